#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reportqa/annotation.hpp"
#include "reportqa/qa_gen.hpp"

namespace reportqa {

struct Prediction {
    std::string qa_id;
    std::string text;
};

std::string predictions_to_jsonl(const std::vector<Prediction>& preds);
std::vector<Prediction> predictions_from_jsonl(std::string_view bytes);

// Per-image attributes used to stratify scores.
struct ImageMeta {
    ImageType image_type = ImageType::scanned_pdf;
    QualityLabel quality = QualityLabel::High;
};

using StrataMeta = std::map<std::string, ImageMeta>;

StrataMeta strata_meta_from_annotations(const std::vector<ReportAnnotation>& annotations);
StrataMeta strata_meta_from_json(std::string_view bytes);

// One aggregation bucket. rouge_l is reported only for the free-text
// tasks (Entity, Table, Reason-SA, Custom); the numeric-reasoning and
// multiple-choice rows carry soft accuracy alone.
struct MetricCell {
    std::size_t n = 0;
    double soft_accuracy = 0;
    std::optional<double> rouge_l;
};

struct HallucinationStats {
    std::size_t unanswerable_total = 0;
    std::size_t answered_anyway = 0;
};

struct ScoreReport {
    // Row keys: Entity, Table, TableNR, Reason-MC, Reason-SA, Custom.
    std::map<std::string, MetricCell> per_task;
    std::map<std::string, MetricCell> per_subtask;  // "Entity/Single", ...
    // dimension -> bucket -> row -> cell, dimensions: image_type
    // (Electronic/Photo/unknown), quality (High/Low/unknown), difficulty
    // (Single/Multi).
    std::map<std::string, std::map<std::string, std::map<std::string, MetricCell>>> strata;
    HallucinationStats hallucination;
};

// Missing predictions score as empty strings so partial runs stay
// comparable; predictions for unknown qa_ids are an error listing the
// offenders.
ScoreReport score_run(const std::vector<QaItem>& bank, const std::vector<Prediction>& predictions,
                      const StrataMeta& meta = {});

HallucinationStats hallucination_stats(const std::vector<QaItem>& bank,
                                       const std::vector<Prediction>& predictions);

std::string score_report_to_json(const ScoreReport& report);
std::string render_score_table(const ScoreReport& report);

}  // namespace reportqa
