#pragma once

#include <string>
#include <vector>

#include "reportqa/annotation.hpp"
#include "reportqa/rng.hpp"

namespace reportqa::testing {

// A fully consistent laboratory annotation: mapped keys, correct flags,
// declared item count matching the table.
inline ReportAnnotation consistent_lab_annotation(const std::string& image_id = "img-lab-1") {
    ReportAnnotation ann;
    ann.image_id = image_id;
    ann.report_class = ReportClass::laboratory;
    ann.kv_pairs = {{"Date", "2023-06-01", {}}, {"Name", "Anonymous", {}}};
    ann.quadruplets = {
        {"Hb", "130", "115-150", AbnormalFlag::Normal},
        {"WBC", "10.2", "3.5-9.5", AbnormalFlag::High},
        {"PLT", "98", "125-350", AbnormalFlag::Low},
        {"PSA", "4.2", "", AbnormalFlag::Undetermined},
    };
    ann.declared_item_count = 4;
    ann.quality = QualityLabel::High;
    ann.image_type = ImageType::scanned_pdf;
    return ann;
}

inline ReportAnnotation diagnostic_annotation(const std::string& image_id = "img-diag-1") {
    ReportAnnotation ann;
    ann.image_id = image_id;
    ann.report_class = ReportClass::diagnostic;
    ann.kv_pairs = {{"Conclusion", "left renal cyst", {}}, {"Description", "hypoechoic area", {}}};
    ann.context_refs.diagnosis = {"fact-renal-cyst"};
    ann.context_refs.advice = {"fact-renal-cyst-treatment"};
    ann.quality = QualityLabel::High;
    ann.image_type = ImageType::photo;
    return ann;
}

inline std::vector<ContextFact> small_fact_base() {
    return {
        {"fact-mild-anemia", "Mild Anemia", FactReportClass::laboratory,
         ContextType::exam_disease,
         "A hemoglobin level of 90 g/L to 120 g/L indicates mild anemia."},
        {"fact-moderate-anemia", "Moderate Anemia", FactReportClass::laboratory,
         ContextType::exam_disease,
         "A hemoglobin level of 60 g/L to 90 g/L indicates moderate anemia."},
        {"fact-severe-anemia", "Severe Anemia", FactReportClass::laboratory,
         ContextType::exam_disease, "A hemoglobin level below 60 g/L indicates severe anemia."},
        {"fact-renal-cyst", "Renal Cyst", FactReportClass::clinical, ContextType::exam_disease,
         "A round hypoechoic renal area with clear borders suggests a simple renal cyst."},
        {"fact-renal-cyst-treatment", "Renal Cysts Treatment", FactReportClass::clinical,
         ContextType::disease_treatment,
         "Small asymptomatic renal cysts are monitored; cysts over 8 cm are decorticated."},
        {"fact-thrombosis", "Thrombosis Formation", FactReportClass::laboratory,
         ContextType::disease_advice,
         "Thrombosis formation can be treated with low-molecular-weight heparin."},
    };
}

// Twenty graded titles so distractor ranking has structure.
inline std::vector<ContextFact> fact_base_20() {
    const std::vector<std::string> titles = {
        "Mild Anemia",
        "Moderate Anemia",
        "Severe Anemia",
        "Aplastic Anemia",
        "Iron Deficiency Anemia",
        "Renal Cyst",
        "Renal Cysts Treatment",
        "Renal Calculus",
        "Renal Failure Staging",
        "Prostate Cancer Screening",
        "Prostate Cancer Staging",
        "Prostatitis Treatment",
        "Bladder Tumor Follow-up",
        "Bladder Stone Removal",
        "Thrombosis Formation",
        "Thrombosis Monitoring",
        "Urinary Infection Treatment",
        "Urinary Retention Advice",
        "Testicular Tumor Prognosis",
        "Hydronephrosis Grading",
    };
    std::vector<ContextFact> facts;
    for (std::size_t i = 0; i < titles.size(); ++i) {
        facts.push_back({"fact-" + std::to_string(i), titles[i],
                         i % 2 ? FactReportClass::clinical : FactReportClass::laboratory,
                         ContextType::exam_disease, "Reference description for " + titles[i] + "."});
    }
    return facts;
}

// Random but structurally valid annotation for property tests.
inline ReportAnnotation random_annotation(Rng& rng, const std::string& image_id,
                                          const std::vector<ContextFact>& facts) {
    ReportAnnotation ann;
    ann.image_id = image_id;
    ann.report_class = rng.bernoulli(0.5) ? ReportClass::laboratory : ReportClass::diagnostic;
    const std::vector<std::string> keys = {"Date", "Name", "Age", "Conclusion", "Description"};
    const std::size_t n_kv = 1 + rng.next_below(4);
    for (std::size_t i = 0; i < n_kv; ++i) {
        ann.kv_pairs.push_back(
            {keys[i % keys.size()], "value-" + std::to_string(rng.next_below(1000)), {}});
    }
    const std::size_t n_rows = rng.next_below(5);
    for (std::size_t i = 0; i < n_rows; ++i) {
        const double lo = 1.0 + static_cast<double>(rng.next_below(50));
        const double hi = lo + 1.0 + static_cast<double>(rng.next_below(50));
        const double value = lo - 5.0 + static_cast<double>(rng.next_below(60));
        Quadruplet q;
        q.item = "ITEM" + std::to_string(i);
        q.result = std::to_string(value);
        q.range = std::to_string(lo) + "-" + std::to_string(hi);
        q.flag = value < lo ? AbnormalFlag::Low
                            : (value > hi ? AbnormalFlag::High : AbnormalFlag::Normal);
        ann.quadruplets.push_back(std::move(q));
    }
    if (ann.report_class == ReportClass::laboratory && ann.kv_pairs.empty() &&
        ann.quadruplets.empty()) {
        ann.kv_pairs.push_back({"Date", "2023-01-01", {}});
    }
    if (!facts.empty() && rng.bernoulli(0.7)) {
        ann.context_refs.diagnosis = {facts[rng.next_below(facts.size())].id};
    }
    ann.quality = rng.bernoulli(0.8) ? QualityLabel::High : QualityLabel::Low;
    ann.image_type = rng.bernoulli(0.5) ? ImageType::photo : ImageType::screenshot;
    return ann;
}

}  // namespace reportqa::testing
