#include "reportqa/scoring.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "reportqa/error.hpp"
#include "reportqa/metrics.hpp"
#include "reportqa/textutil.hpp"

namespace reportqa {

using nlohmann::json;

std::string predictions_to_jsonl(const std::vector<Prediction>& preds) {
    std::string out;
    for (const auto& p : preds) {
        json j;
        j["qa_id"] = p.qa_id;
        j["text"] = p.text;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<Prediction> predictions_from_jsonl(std::string_view bytes) {
    std::vector<Prediction> preds;
    std::size_t start = 0;
    while (start < bytes.size()) {
        std::size_t end = bytes.find('\n', start);
        if (end == std::string_view::npos) end = bytes.size();
        const std::string_view line = bytes.substr(start, end - start);
        if (!line.empty() && line != "\r") {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw ParseError("malformed prediction JSON at byte " + std::to_string(e.byte) +
                                 ": " + e.what(), e.byte);
            }
            preds.push_back({j.at("qa_id").get<std::string>(), j.at("text").get<std::string>()});
        }
        start = end + 1;
    }
    return preds;
}

StrataMeta strata_meta_from_annotations(const std::vector<ReportAnnotation>& annotations) {
    StrataMeta meta;
    for (const auto& ann : annotations) {
        meta[ann.image_id] = ImageMeta{ann.image_type, ann.quality};
    }
    return meta;
}

StrataMeta strata_meta_from_json(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed meta JSON at byte " + std::to_string(e.byte) + ": " + e.what(),
                         e.byte);
    }
    StrataMeta meta;
    if (!root.is_array()) throw ValidationError("meta must be a JSON array");
    for (const auto& m : root) {
        ImageMeta im;
        im.image_type = image_type_from_string(m.at("image_type").get<std::string>());
        im.quality = quality_label_from_string(m.at("quality").get<std::string>());
        meta[m.at("image_id").get<std::string>()] = im;
    }
    return meta;
}

namespace {

struct Acc {
    std::size_t n = 0;
    double acc_sum = 0;
    double rouge_sum = 0;
    bool has_rouge = false;

    void add(int acc, std::optional<double> rouge) {
        ++n;
        acc_sum += acc;
        if (rouge) {
            rouge_sum += *rouge;
            has_rouge = true;
        }
    }

    MetricCell finalize() const {
        MetricCell cell;
        cell.n = n;
        cell.soft_accuracy = n > 0 ? acc_sum / static_cast<double>(n) : 0.0;
        if (has_rouge && n > 0) cell.rouge_l = rouge_sum / static_cast<double>(n);
        return cell;
    }
};

std::string task_row_key(const QaItem& item) {
    if (item.task == QaTask::Reason) return "Reason-" + to_string(item.subtask);
    return to_string(item.task);
}

bool row_reports_rouge(const QaItem& item) {
    if (item.task == QaTask::Entity || item.task == QaTask::Table ||
        item.task == QaTask::Custom) {
        return true;
    }
    return item.task == QaTask::Reason && item.subtask == QaSubtask::SA;
}

std::optional<std::string> difficulty_bucket(QaSubtask subtask) {
    switch (subtask) {
        case QaSubtask::Single:
        case QaSubtask::SingleCell:
        case QaSubtask::SingleRow:
        case QaSubtask::Comparison:
            return "Single";
        case QaSubtask::Multi:
        case QaSubtask::MultiRow:
        case QaSubtask::MultiAbnormal:
            return "Multi";
        default:
            return std::nullopt;
    }
}

json cell_to_json(const MetricCell& cell) {
    json j;
    j["n"] = cell.n;
    j["soft_accuracy"] = cell.soft_accuracy;
    if (cell.rouge_l) j["rouge_l"] = *cell.rouge_l;
    return j;
}

}  // namespace

ScoreReport score_run(const std::vector<QaItem>& bank, const std::vector<Prediction>& predictions,
                      const StrataMeta& meta) {
    std::map<std::string, const QaItem*> bank_index;
    for (const auto& item : bank) bank_index[item.qa_id] = &item;

    std::map<std::string, const std::string*> pred_index;
    std::vector<std::string> unknown;
    for (const auto& p : predictions) {
        if (!bank_index.count(p.qa_id)) unknown.push_back(p.qa_id);
        pred_index[p.qa_id] = &p.text;
    }
    if (!unknown.empty()) {
        std::string msg = "predictions reference unknown qa_ids:";
        for (const auto& id : unknown) msg += " " + id;
        throw ValidationError(msg);
    }

    std::map<std::string, Acc> per_task;
    std::map<std::string, Acc> per_subtask;
    std::map<std::string, std::map<std::string, std::map<std::string, Acc>>> strata;

    for (const auto& item : bank) {
        static const std::string empty;
        const std::string& pred =
            pred_index.count(item.qa_id) ? *pred_index[item.qa_id] : empty;

        const int acc = soft_accuracy(pred, item.answer);
        std::optional<double> rouge;
        if (row_reports_rouge(item)) rouge = rouge_l(pred, item.answer);

        const std::string row = task_row_key(item);
        per_task[row].add(acc, rouge);
        per_subtask[to_string(item.task) + "/" + to_string(item.subtask)].add(acc, rouge);

        std::string type_bucket = "unknown";
        std::string quality_bucket = "unknown";
        auto it = meta.find(item.image_id);
        if (it != meta.end()) {
            type_bucket = it->second.image_type == ImageType::photo ? "Photo" : "Electronic";
            quality_bucket = it->second.quality == QualityLabel::High ? "High" : "Low";
        }
        strata["image_type"][type_bucket][row].add(acc, rouge);
        strata["quality"][quality_bucket][row].add(acc, rouge);
        if (auto diff = difficulty_bucket(item.subtask)) {
            strata["difficulty"][*diff][row].add(acc, rouge);
        }
    }

    ScoreReport report;
    for (const auto& [k, acc] : per_task) report.per_task[k] = acc.finalize();
    for (const auto& [k, acc] : per_subtask) report.per_subtask[k] = acc.finalize();
    for (const auto& [dim, buckets] : strata) {
        for (const auto& [bucket, rows] : buckets) {
            for (const auto& [row, acc] : rows) {
                report.strata[dim][bucket][row] = acc.finalize();
            }
        }
    }
    report.hallucination = hallucination_stats(bank, predictions);
    return report;
}

HallucinationStats hallucination_stats(const std::vector<QaItem>& bank,
                                       const std::vector<Prediction>& predictions) {
    std::map<std::string, const std::string*> pred_index;
    for (const auto& p : predictions) pred_index[p.qa_id] = &p.text;

    HallucinationStats stats;
    for (const auto& item : bank) {
        if (item.answerable) continue;
        ++stats.unanswerable_total;
        static const std::string empty;
        const std::string& pred =
            pred_index.count(item.qa_id) ? *pred_index[item.qa_id] : empty;
        if (!contains_normalized(pred, kAbstainToken)) ++stats.answered_anyway;
    }
    return stats;
}

std::string score_report_to_json(const ScoreReport& report) {
    json root;
    root["per_task"] = json::object();
    for (const auto& [k, cell] : report.per_task) root["per_task"][k] = cell_to_json(cell);
    root["per_subtask"] = json::object();
    for (const auto& [k, cell] : report.per_subtask) root["per_subtask"][k] = cell_to_json(cell);
    root["strata"] = json::object();
    for (const auto& [dim, buckets] : report.strata) {
        for (const auto& [bucket, rows] : buckets) {
            for (const auto& [row, cell] : rows) {
                root["strata"][dim][bucket][row] = cell_to_json(cell);
            }
        }
    }
    root["hallucination"] = {{"unanswerable_total", report.hallucination.unanswerable_total},
                             {"answered_anyway", report.hallucination.answered_anyway}};
    return root.dump(2);
}

namespace {

void append_rows(std::string& out, const std::map<std::string, MetricCell>& rows,
                 const std::string& indent) {
    for (const auto& [name, cell] : rows) {
        char buf[160];
        if (cell.rouge_l) {
            std::snprintf(buf, sizeof(buf), "%s%-18s %6zu   %6.3f   %6.3f\n", indent.c_str(),
                          name.c_str(), cell.n, cell.soft_accuracy, *cell.rouge_l);
        } else {
            std::snprintf(buf, sizeof(buf), "%s%-18s %6zu   %6.3f        -\n", indent.c_str(),
                          name.c_str(), cell.n, cell.soft_accuracy);
        }
        out += buf;
    }
}

}  // namespace

std::string render_score_table(const ScoreReport& report) {
    std::string out;
    out += "task                    n      acc   rougeL\n";
    append_rows(out, report.per_task, "");
    for (const auto& [dim, buckets] : report.strata) {
        out += "\nby " + dim + ":\n";
        for (const auto& [bucket, rows] : buckets) {
            out += "  " + bucket + ":\n";
            append_rows(out, rows, "    ");
        }
    }
    out += "\nunanswerable: " + std::to_string(report.hallucination.unanswerable_total) +
           ", answered anyway: " + std::to_string(report.hallucination.answered_anyway) + "\n";
    return out;
}

}  // namespace reportqa
