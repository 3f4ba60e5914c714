#include "reportqa/qa_gen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "reportqa/error.hpp"
#include "reportqa/log.hpp"
#include "reportqa/parallel.hpp"
#include "reportqa/textutil.hpp"

namespace reportqa {

using nlohmann::json;

std::string to_string(QaTask t) {
    switch (t) {
        case QaTask::Entity: return "Entity";
        case QaTask::Table: return "Table";
        case QaTask::TableNR: return "TableNR";
        case QaTask::Reason: return "Reason";
        case QaTask::Custom: return "Custom";
    }
    return "Entity";
}

QaTask qa_task_from_string(std::string_view s) {
    if (s == "Entity") return QaTask::Entity;
    if (s == "Table") return QaTask::Table;
    if (s == "TableNR") return QaTask::TableNR;
    if (s == "Reason") return QaTask::Reason;
    if (s == "Custom") return QaTask::Custom;
    throw ValidationError("unknown task \"" + std::string(s) + "\"");
}

std::string to_string(QaSubtask t) {
    switch (t) {
        case QaSubtask::Single: return "Single";
        case QaSubtask::Multi: return "Multi";
        case QaSubtask::SingleCell: return "SingleCell";
        case QaSubtask::SingleRow: return "SingleRow";
        case QaSubtask::MultiRow: return "MultiRow";
        case QaSubtask::Comparison: return "Comparison";
        case QaSubtask::MultiAbnormal: return "MultiAbnormal";
        case QaSubtask::MC: return "MC";
        case QaSubtask::SA: return "SA";
        case QaSubtask::Summarization: return "Summarization";
    }
    return "Single";
}

QaSubtask qa_subtask_from_string(std::string_view s) {
    if (s == "Single") return QaSubtask::Single;
    if (s == "Multi") return QaSubtask::Multi;
    if (s == "SingleCell") return QaSubtask::SingleCell;
    if (s == "SingleRow") return QaSubtask::SingleRow;
    if (s == "MultiRow") return QaSubtask::MultiRow;
    if (s == "Comparison") return QaSubtask::Comparison;
    if (s == "MultiAbnormal") return QaSubtask::MultiAbnormal;
    if (s == "MC") return QaSubtask::MC;
    if (s == "SA") return QaSubtask::SA;
    if (s == "Summarization") return QaSubtask::Summarization;
    throw ValidationError("unknown subtask \"" + std::string(s) + "\"");
}

std::string to_string(AnswerType t) {
    switch (t) {
        case AnswerType::SS: return "SS";
        case AnswerType::MS: return "MS";
        case AnswerType::NS: return "NS";
    }
    return "SS";
}

AnswerType answer_type_from_string(std::string_view s) {
    if (s == "SS") return AnswerType::SS;
    if (s == "MS") return AnswerType::MS;
    if (s == "NS") return AnswerType::NS;
    throw ValidationError("unknown answer_type \"" + std::string(s) + "\"");
}

// ---------------------------------------------------------------------------
// Serialization

std::string qa_item_to_json(const QaItem& item) {
    json j;
    j["qa_id"] = item.qa_id;
    j["image_id"] = item.image_id;
    j["task"] = to_string(item.task);
    j["subtask"] = to_string(item.subtask);
    j["question"] = item.question;
    j["answer"] = item.answer;
    j["answer_type"] = to_string(item.answer_type);
    j["answerable"] = item.answerable;
    if (item.options) j["options"] = *item.options;
    if (item.correct_index) j["correct_index"] = *item.correct_index;
    j["context_ids"] = item.context_ids;
    return j.dump();
}

QaItem qa_item_from_json(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed QA item JSON at byte " + std::to_string(e.byte) + ": " +
                         e.what(), e.byte);
    }
    QaItem item;
    item.qa_id = j.at("qa_id").get<std::string>();
    item.image_id = j.at("image_id").get<std::string>();
    item.task = qa_task_from_string(j.at("task").get<std::string>());
    item.subtask = qa_subtask_from_string(j.at("subtask").get<std::string>());
    item.question = j.at("question").get<std::string>();
    item.answer = j.at("answer").get<std::string>();
    item.answer_type = answer_type_from_string(j.at("answer_type").get<std::string>());
    item.answerable = j.at("answerable").get<bool>();
    if (j.contains("options") && !j["options"].is_null()) {
        item.options = j["options"].get<std::vector<std::string>>();
    }
    if (j.contains("correct_index") && !j["correct_index"].is_null()) {
        item.correct_index = j["correct_index"].get<int>();
    }
    item.context_ids = j.value("context_ids", std::vector<std::string>{});
    return item;
}

std::string bank_to_jsonl(const std::vector<QaItem>& bank) {
    std::string out;
    for (const auto& item : bank) {
        out += qa_item_to_json(item);
        out += '\n';
    }
    return out;
}

std::vector<QaItem> bank_from_jsonl(std::string_view bytes) {
    std::vector<QaItem> bank;
    std::size_t start = 0;
    while (start < bytes.size()) {
        std::size_t end = bytes.find('\n', start);
        if (end == std::string_view::npos) end = bytes.size();
        std::string_view line = bytes.substr(start, end - start);
        if (!line.empty() && line != "\r") bank.push_back(qa_item_from_json(line));
        start = end + 1;
    }
    return bank;
}

// ---------------------------------------------------------------------------
// Similarity

double BigramCosineSimilarity::score(std::string_view a, std::string_view b) const {
    auto bigrams = [](std::string_view s) {
        std::map<std::u32string, double> counts;
        const std::u32string cps = decode_utf8(normalize_for_match(s));
        if (cps.size() < 2) {
            if (!cps.empty()) counts[cps] += 1.0;
            return counts;
        }
        for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
            counts[cps.substr(i, 2)] += 1.0;
        }
        return counts;
    };
    const auto ca = bigrams(a);
    const auto cb = bigrams(b);
    if (ca.empty() || cb.empty()) return ca.empty() && cb.empty() ? 1.0 : 0.0;
    double dot = 0, na = 0, nb = 0;
    for (const auto& [g, n] : ca) {
        na += n * n;
        auto it = cb.find(g);
        if (it != cb.end()) dot += n * it->second;
    }
    for (const auto& [g, n] : cb) nb += n * n;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    }
    return out;
}

bool blank(const std::string& s) { return normalize_for_match(s).empty(); }

// Question-side vocabulary: a seeded pick among the canonical term and its
// synonyms, rendered lower-case. Answers keep the fixed template wording so
// substitution never touches the factual payload.
std::string pick_vocab(const SynonymSchema& schema, const std::string& canonical,
                       const std::string& fallback, Rng& rng) {
    if (!schema.has_canonical(canonical)) return fallback;
    const auto& synonyms = schema.synonyms_of(canonical);
    const std::size_t n = synonyms.size() + 1;
    const std::size_t pick = static_cast<std::size_t>(rng.next_below(n));
    return ascii_lower(pick == 0 ? canonical : synonyms[pick - 1]);
}

std::string render_key(const std::string& key, const SynonymSchema& schema, Rng& rng) {
    const CanonicalKey canonical = canonicalize(key, schema);
    if (!canonical.mapped) return key;
    const auto& synonyms = schema.synonyms_of(canonical.key);
    const std::size_t n = synonyms.size() + 1;
    const std::size_t pick = static_cast<std::size_t>(rng.next_below(n));
    return pick == 0 ? canonical.key : synonyms[pick - 1];
}

std::string qa_id_for(const std::string& image_id, const std::string& family, std::size_t n) {
    return image_id + "#" + family + "-" + std::to_string(n);
}

std::string verdict_word(AbnormalFlag flag) {
    switch (flag) {
        case AbnormalFlag::Normal: return "normal";
        case AbnormalFlag::High: return "abnormal (high)";
        case AbnormalFlag::Low: return "abnormal (low)";
        case AbnormalFlag::Undetermined: return "undetermined";
    }
    return "undetermined";
}

}  // namespace

// ---------------------------------------------------------------------------
// Generators

std::vector<QaItem> generate_entity(const ReportAnnotation& ann, const SynonymSchema& schema,
                                    Rng& rng) {
    std::vector<const KeyValuePair*> usable;
    for (const auto& kv : ann.kv_pairs) {
        if (!blank(kv.key) && !blank(kv.value)) usable.push_back(&kv);
    }

    std::vector<QaItem> items;
    for (std::size_t i = 0; i < usable.size(); ++i) {
        const auto& kv = *usable[i];
        const std::string key = render_key(kv.key, schema, rng);
        QaItem item;
        item.qa_id = qa_id_for(ann.image_id, "entity-single", i);
        item.image_id = ann.image_id;
        item.task = QaTask::Entity;
        item.subtask = QaSubtask::Single;
        item.question = "What is the " + key + "?";
        item.answer = key + " is " + kv.value + ".";
        item.answer_type = AnswerType::SS;
        items.push_back(std::move(item));
    }

    std::size_t pair_counter = 0;
    for (std::size_t i = 0; i < usable.size(); ++i) {
        for (std::size_t j = i + 1; j < usable.size(); ++j) {
            const std::string k1 = render_key(usable[i]->key, schema, rng);
            const std::string k2 = render_key(usable[j]->key, schema, rng);
            QaItem item;
            item.qa_id = qa_id_for(ann.image_id, "entity-multi", pair_counter++);
            item.image_id = ann.image_id;
            item.task = QaTask::Entity;
            item.subtask = QaSubtask::Multi;
            item.question = "What are " + k1 + " and " + k2 + "?";
            item.answer = usable[i]->value + "; " + usable[j]->value;
            item.answer_type = AnswerType::MS;
            items.push_back(std::move(item));
        }
    }
    return items;
}

std::vector<QaItem> generate_table(const ReportAnnotation& ann, const SynonymSchema& schema,
                                   Rng& rng, std::size_t multirow_pair_limit) {
    std::vector<const Quadruplet*> rows;
    for (const auto& q : ann.quadruplets) {
        if (!blank(q.item) && !blank(q.result)) rows.push_back(&q);
    }

    std::vector<QaItem> items;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& q = *rows[i];
        const std::string voc = pick_vocab(schema, "Result", "laboratory result", rng);
        QaItem item;
        item.qa_id = qa_id_for(ann.image_id, "table-singlecell", i);
        item.image_id = ann.image_id;
        item.task = QaTask::Table;
        item.subtask = QaSubtask::SingleCell;
        item.question = "What is the " + voc + " of " + q.item + "?";
        item.answer = "The laboratory result of " + q.item + " is " + q.result + ".";
        item.answer_type = AnswerType::SS;
        items.push_back(std::move(item));
    }

    std::vector<const Quadruplet*> ranged;
    for (const auto* q : rows) {
        if (!blank(q->range)) ranged.push_back(q);
    }
    for (std::size_t i = 0; i < ranged.size(); ++i) {
        const auto& q = *ranged[i];
        const std::string res_voc = pick_vocab(schema, "Result", "result", rng);
        const std::string rng_voc = pick_vocab(schema, "Range", "reference range", rng);
        QaItem item;
        item.qa_id = qa_id_for(ann.image_id, "table-singlerow", i);
        item.image_id = ann.image_id;
        item.task = QaTask::Table;
        item.subtask = QaSubtask::SingleRow;
        item.question = "What is the " + res_voc + " and " + rng_voc + " of " + q.item + "?";
        item.answer = "The result of " + q.item + " is " + q.result +
                      ", and the reference range is " + q.range + ".";
        item.answer_type = AnswerType::MS;
        items.push_back(std::move(item));
    }

    if (ranged.size() >= 2) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < ranged.size(); ++i) {
            for (std::size_t j = i + 1; j < ranged.size(); ++j) pairs.emplace_back(i, j);
        }
        std::size_t limit = multirow_pair_limit > 0
                                ? multirow_pair_limit
                                : std::min(pairs.size(), 2 * ranged.size());
        if (limit < pairs.size()) {
            rng.shuffle(pairs);
            pairs.resize(limit);
            std::sort(pairs.begin(), pairs.end());
        }
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            const auto& a = *ranged[pairs[n].first];
            const auto& b = *ranged[pairs[n].second];
            const std::string res_voc = pick_vocab(schema, "Result", "results", rng);
            const std::string rng_voc = pick_vocab(schema, "Range", "standard interval", rng);
            QaItem item;
            item.qa_id = qa_id_for(ann.image_id, "table-multirow", n);
            item.image_id = ann.image_id;
            item.task = QaTask::Table;
            item.subtask = QaSubtask::MultiRow;
            item.question = "What are the " + res_voc + " and " + rng_voc + " of " + a.item +
                            " and " + b.item + " correspondingly?";
            item.answer = a.item + ", " + a.result + ", " + a.range + "; " + b.item + ", " +
                          b.result + ", " + b.range + ";";
            item.answer_type = AnswerType::MS;
            items.push_back(std::move(item));
        }
    }
    return items;
}

std::vector<QaItem> generate_tablenr(const ReportAnnotation& ann, const SynonymSchema& schema,
                                     Rng& rng) {
    std::vector<QaItem> items;
    std::size_t n = 0;
    for (const auto& q : ann.quadruplets) {
        if (blank(q.item) || blank(q.result)) continue;
        if (q.flag == AbnormalFlag::Undetermined) continue;
        const std::string rng_voc = pick_vocab(schema, "Range", "normal range", rng);
        QaItem item;
        item.qa_id = qa_id_for(ann.image_id, "tablenr-comparison", n++);
        item.image_id = ann.image_id;
        item.task = QaTask::TableNR;
        item.subtask = QaSubtask::Comparison;
        item.question = "Is " + q.item + " within " + rng_voc + "?";
        item.answer = "The result of " + q.item + " is " + q.result +
                      " and the normal range is " + q.range + ", hence it is " +
                      verdict_word(q.flag) + ".";
        item.answer_type = AnswerType::NS;
        items.push_back(std::move(item));
    }

    if (!ann.quadruplets.empty()) {
        std::string listed;
        for (const auto& q : ann.quadruplets) {
            if (q.flag != AbnormalFlag::High && q.flag != AbnormalFlag::Low) continue;
            if (!listed.empty()) listed += ", ";
            listed += q.item + " (" + (q.flag == AbnormalFlag::High ? "high" : "low") + ")";
        }
        QaItem item;
        item.qa_id = qa_id_for(ann.image_id, "tablenr-multiabnormal", 0);
        item.image_id = ann.image_id;
        item.task = QaTask::TableNR;
        item.subtask = QaSubtask::MultiAbnormal;
        item.question = "Is there any abnormal indicators in this report?";
        item.answer = listed.empty() ? "There are no abnormal indicators in this report."
                                     : "The abnormal indicators are " + listed + ".";
        item.answer_type = AnswerType::NS;
        items.push_back(std::move(item));
    }
    return items;
}

// ---------------------------------------------------------------------------
// Custom templates

QaTemplate builtin_summarization_template() {
    QaTemplate t;
    t.task = QaTask::Custom;
    t.subtask = QaSubtask::Summarization;
    t.question_pattern = "What key elements should be noticed in this medical report?";
    t.answer_pattern =
        "There are {item_count} items in this report. {abnormal_count} are not in standard "
        "reference, which are {abnormal_items}.";
    return t;
}

namespace {

std::string resolve_slots(const std::string& pattern, const ReportAnnotation& ann) {
    std::string out;
    std::size_t pos = 0;
    while (pos < pattern.size()) {
        const std::size_t open = pattern.find('{', pos);
        if (open == std::string::npos) {
            out += pattern.substr(pos);
            break;
        }
        const std::size_t close = pattern.find('}', open);
        if (close == std::string::npos) {
            throw Error("unterminated slot in template: \"" + pattern.substr(open) + "\"");
        }
        out += pattern.substr(pos, open - pos);
        const std::string slot = pattern.substr(open + 1, close - open - 1);

        std::vector<const Quadruplet*> abnormal;
        for (const auto& q : ann.quadruplets) {
            if (q.flag == AbnormalFlag::High || q.flag == AbnormalFlag::Low) {
                abnormal.push_back(&q);
            }
        }
        if (slot == "item_count" || slot == "abnormal_count" || slot == "abnormal_items") {
            if (ann.quadruplets.empty()) {
                throw Error("cannot resolve slot \"" + slot + "\": annotation has no table");
            }
            if (slot == "item_count") {
                out += std::to_string(ann.quadruplets.size());
            } else if (slot == "abnormal_count") {
                out += std::to_string(abnormal.size());
            } else {
                if (abnormal.empty()) {
                    out += "none";
                } else {
                    for (std::size_t i = 0; i < abnormal.size(); ++i) {
                        if (i > 0) out += ", ";
                        out += abnormal[i]->item;
                    }
                }
            }
        } else if (slot.rfind("key:", 0) == 0) {
            const std::string wanted = normalize_for_match(slot.substr(4));
            const KeyValuePair* found = nullptr;
            for (const auto& kv : ann.kv_pairs) {
                if (normalize_for_match(kv.key) == wanted) {
                    found = &kv;
                    break;
                }
            }
            if (!found) throw Error("cannot resolve slot \"" + slot + "\": key not annotated");
            out += found->value;
        } else {
            throw Error("cannot resolve slot \"" + slot + "\": unknown slot");
        }
        pos = close + 1;
    }
    return out;
}

}  // namespace

QaItem generate_custom(const ReportAnnotation& ann, const QaTemplate& tmpl) {
    QaItem item;
    item.qa_id = qa_id_for(ann.image_id, "custom-" + ascii_lower(to_string(tmpl.subtask)), 0);
    item.image_id = ann.image_id;
    item.task = tmpl.task;
    item.subtask = tmpl.subtask;
    item.question = resolve_slots(tmpl.question_pattern, ann);
    item.answer = resolve_slots(tmpl.answer_pattern, ann);
    item.answer_type = AnswerType::NS;
    return item;
}

// ---------------------------------------------------------------------------
// Clinical reasoning

namespace {

struct Category {
    const char* name;
    const std::vector<std::string>* refs;
    const char* mc_question;
    const char* sa_question;
};

std::vector<Category> categories_of(const ReportAnnotation& ann) {
    return {
        {"diagnosis", &ann.context_refs.diagnosis,
         "Based on the report and the given context, what is the most likely diagnosis?",
         "According to the report and the given context, what is the diagnosis?"},
        {"status", &ann.context_refs.status,
         "Based on the report and the given context, what best describes the current status or "
         "staging?",
         "According to the report and the given context, what is the current status or staging?"},
        {"advice", &ann.context_refs.advice,
         "Based on the report and the given context, what is the most appropriate advice or "
         "treatment?",
         "According to the report and the given context, what is the advised treatment or "
         "follow-up?"},
    };
}

}  // namespace

std::vector<QaItem> generate_reasoning_mc(const ReportAnnotation& ann, const FactBase& facts,
                                          const SimilarityProvider& sim, Rng& rng) {
    (void)rng;  // option positions are assigned by the bank-level balancer
    std::vector<QaItem> items;
    for (const auto& cat : categories_of(ann)) {
        for (std::size_t n = 0; n < cat.refs->size(); ++n) {
            const ContextFact& gold = facts.by_id((*cat.refs)[n]);
            if (facts.facts().size() < 4) {
                throw Error("fact base must contain at least 4 titles for MC generation");
            }
            struct Scored {
                double score;
                const ContextFact* fact;
            };
            std::vector<Scored> scored;
            for (const auto& f : facts.facts()) {
                if (f.id == gold.id) continue;
                scored.push_back({sim.score(gold.title, f.title), &f});
            }
            std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.fact->id < b.fact->id;
            });

            QaItem item;
            item.qa_id = qa_id_for(ann.image_id, std::string("reason-mc-") + cat.name, n);
            item.image_id = ann.image_id;
            item.task = QaTask::Reason;
            item.subtask = QaSubtask::MC;
            item.question = cat.mc_question;
            item.answer = gold.title;
            item.answer_type = AnswerType::NS;
            item.options = std::vector<std::string>{gold.title};
            item.context_ids = {gold.id};
            for (std::size_t d = 0; d < 3; ++d) {
                item.options->push_back(scored[d].fact->title);
                item.context_ids.push_back(scored[d].fact->id);
            }
            item.correct_index = 0;
            items.push_back(std::move(item));
        }
    }
    return items;
}

std::vector<QaItem> generate_reasoning_sa(const ReportAnnotation& ann, const FactBase& facts) {
    std::vector<QaItem> items;
    for (const auto& cat : categories_of(ann)) {
        if (cat.refs->empty()) continue;
        std::string answer;
        for (const auto& id : *cat.refs) {
            if (!answer.empty()) answer += "; ";
            answer += facts.by_id(id).title;
        }
        QaItem item;
        item.qa_id = qa_id_for(ann.image_id, std::string("reason-sa-") + cat.name, 0);
        item.image_id = ann.image_id;
        item.task = QaTask::Reason;
        item.subtask = QaSubtask::SA;
        item.question = cat.sa_question;
        item.answer = answer;
        item.answer_type = AnswerType::NS;
        item.context_ids = *cat.refs;
        items.push_back(std::move(item));
    }
    return items;
}

void balance_mc_positions(std::vector<QaItem>& bank, Rng& rng) {
    const int start = static_cast<int>(rng.next_below(4));
    int counter = 0;
    for (auto& item : bank) {
        if (!(item.task == QaTask::Reason && item.subtask == QaSubtask::MC)) continue;
        if (!item.options || !item.correct_index) continue;
        const std::string gold = (*item.options)[static_cast<std::size_t>(*item.correct_index)];
        std::vector<std::string> distractors;
        for (std::size_t i = 0; i < item.options->size(); ++i) {
            if (static_cast<int>(i) != *item.correct_index) {
                distractors.push_back((*item.options)[i]);
            }
        }
        const int pos = (start + counter) % 4;
        ++counter;
        std::vector<std::string> rearranged(4);
        rearranged[static_cast<std::size_t>(pos)] = gold;
        std::size_t d = 0;
        for (int i = 0; i < 4; ++i) {
            if (i == pos) continue;
            rearranged[static_cast<std::size_t>(i)] = distractors[d++];
        }
        item.options = rearranged;
        item.correct_index = pos;
    }
}

// ---------------------------------------------------------------------------
// Unanswerable rewrites

const std::vector<std::string>& unanswerable_key_pool() {
    static const std::vector<std::string> pool = {
        "Specimen Number",  "Attending Physician", "Ward",
        "Bed Number",       "Sample Type",         "Collection Location",
        "Insurance Number", "Referring Department"};
    return pool;
}

const std::vector<std::string>& unanswerable_item_pool() {
    static const std::vector<std::string> pool = {
        "Myoglobin", "Homocysteine", "Cystatin C", "Procalcitonin",
        "Troponin I", "Amylase",     "Lipase",     "Ferritin"};
    return pool;
}

namespace {

std::vector<std::string> absent_candidates(const std::vector<std::string>& pool,
                                           const std::set<std::string>& present) {
    std::vector<std::string> out;
    for (const auto& p : pool) {
        if (!present.count(normalize_for_match(p))) out.push_back(p);
    }
    return out;
}

}  // namespace

void mark_unanswerable(std::vector<QaItem>& bank,
                       const std::vector<ReportAnnotation>& annotations, Rng& rng,
                       double fraction) {
    if (fraction <= 0) return;
    std::map<std::string, const ReportAnnotation*> by_id;
    for (const auto& ann : annotations) by_id[ann.image_id] = &ann;

    for (auto& item : bank) {
        if (item.task != QaTask::Entity && item.task != QaTask::Table) continue;
        if (!item.answerable) continue;
        if (!rng.bernoulli(fraction)) continue;

        auto ann_it = by_id.find(item.image_id);
        if (ann_it == by_id.end()) continue;
        const ReportAnnotation& ann = *ann_it->second;

        std::set<std::string> present;
        const auto& pool =
            item.task == QaTask::Entity ? unanswerable_key_pool() : unanswerable_item_pool();
        if (item.task == QaTask::Entity) {
            for (const auto& kv : ann.kv_pairs) present.insert(normalize_for_match(kv.key));
        } else {
            for (const auto& q : ann.quadruplets) present.insert(normalize_for_match(q.item));
        }
        std::vector<std::string> decoys = absent_candidates(pool, present);

        const bool needs_two =
            item.subtask == QaSubtask::Multi || item.subtask == QaSubtask::MultiRow;
        if (decoys.size() < (needs_two ? 2u : 1u)) continue;

        const std::string d1 = decoys[rng.next_below(decoys.size())];
        std::string d2;
        if (needs_two) {
            do {
                d2 = decoys[rng.next_below(decoys.size())];
            } while (d2 == d1);
        }

        switch (item.subtask) {
            case QaSubtask::Single:
                item.question = "What is the " + d1 + "?";
                break;
            case QaSubtask::Multi:
                item.question = "What are " + d1 + " and " + d2 + "?";
                break;
            case QaSubtask::SingleCell:
                item.question = "What is the laboratory result of " + d1 + "?";
                break;
            case QaSubtask::SingleRow:
                item.question = "What is the result and reference range of " + d1 + "?";
                break;
            case QaSubtask::MultiRow:
                item.question = "What are the results and reference ranges of " + d1 + " and " +
                                d2 + " correspondingly?";
                break;
            default:
                continue;
        }
        item.answer = kAbstainToken;
        item.answerable = false;
    }
}

// ---------------------------------------------------------------------------
// Bank assembly

std::vector<QaItem> generate_bank(const std::vector<ReportAnnotation>& annotations,
                                  const FactBase& facts, const SynonymSchema& schema,
                                  const SimilarityProvider& sim, const GenConfig& config) {
    std::set<std::string> seen_ids;
    for (const auto& ann : annotations) {
        if (!seen_ids.insert(ann.image_id).second) {
            throw ValidationError("duplicate image_id \"" + ann.image_id + "\" in corpus");
        }
    }

    const Rng base(config.seed);
    std::vector<std::vector<QaItem>> per_annotation(annotations.size());
    parallel_for(std::max<std::size_t>(config.jobs, 1), annotations.size(), [&](std::size_t i) {
        const ReportAnnotation& ann = annotations[i];
        Rng rng = base.fork(ann.image_id);
        std::vector<QaItem>& items = per_annotation[i];
        auto append = [&](std::vector<QaItem>&& generated) {
            for (auto& item : generated) items.push_back(std::move(item));
        };
        append(generate_entity(ann, schema, rng));
        append(generate_table(ann, schema, rng, config.multirow_pair_limit));
        append(generate_tablenr(ann, schema, rng));
        append(generate_reasoning_mc(ann, facts, sim, rng));
        append(generate_reasoning_sa(ann, facts));
        if (config.custom_template) {
            try {
                items.push_back(generate_custom(ann, *config.custom_template));
            } catch (const Error& e) {
                log_warn(ann.image_id + ": custom template skipped: " + e.what());
            }
        }
    });

    std::vector<QaItem> bank;
    for (auto& items : per_annotation) {
        for (auto& item : items) bank.push_back(std::move(item));
    }

    Rng balance_rng = base.fork("mc-positions");
    balance_mc_positions(bank, balance_rng);

    Rng unanswerable_rng = base.fork("unanswerable");
    mark_unanswerable(bank, annotations, unanswerable_rng, config.unanswerable_fraction);
    return bank;
}

}  // namespace reportqa
