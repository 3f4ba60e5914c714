#include "reportqa/annotation.hpp"

#include <algorithm>

#include <json.hpp>

#include "reportqa/error.hpp"
#include "reportqa/textutil.hpp"

namespace reportqa {

using nlohmann::json;

std::string to_string(AbnormalFlag f) {
    switch (f) {
        case AbnormalFlag::Normal: return "Normal";
        case AbnormalFlag::High: return "High";
        case AbnormalFlag::Low: return "Low";
        case AbnormalFlag::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

AbnormalFlag abnormal_flag_from_string(std::string_view s) {
    if (s == "Normal") return AbnormalFlag::Normal;
    if (s == "High") return AbnormalFlag::High;
    if (s == "Low") return AbnormalFlag::Low;
    if (s == "Undetermined") return AbnormalFlag::Undetermined;
    throw ValidationError("unknown abnormal flag \"" + std::string(s) + "\"");
}

std::string to_string(ReportClass c) {
    return c == ReportClass::laboratory ? "laboratory" : "diagnostic";
}

ReportClass report_class_from_string(std::string_view s) {
    if (s == "laboratory") return ReportClass::laboratory;
    if (s == "diagnostic") return ReportClass::diagnostic;
    throw ValidationError("unknown report_class \"" + std::string(s) + "\"");
}

std::string to_string(FactReportClass c) {
    return c == FactReportClass::laboratory ? "laboratory" : "clinical";
}

FactReportClass fact_report_class_from_string(std::string_view s) {
    if (s == "laboratory") return FactReportClass::laboratory;
    if (s == "clinical") return FactReportClass::clinical;
    throw ValidationError("unknown fact report_class \"" + std::string(s) + "\"");
}

std::string to_string(ContextType t) {
    switch (t) {
        case ContextType::exam_disease: return "Exam-Disease";
        case ContextType::exam_status: return "Exam-Status";
        case ContextType::disease_status: return "Disease-Status";
        case ContextType::disease_advice: return "Disease-Advice";
        case ContextType::exam: return "Exam";
        case ContextType::disease_exam: return "Disease-Exam";
        case ContextType::disease_treatment: return "Disease-Treatment";
    }
    return "Exam";
}

ContextType context_type_from_string(std::string_view s) {
    if (s == "Exam-Disease") return ContextType::exam_disease;
    if (s == "Exam-Status") return ContextType::exam_status;
    if (s == "Disease-Status") return ContextType::disease_status;
    if (s == "Disease-Advice") return ContextType::disease_advice;
    if (s == "Exam") return ContextType::exam;
    if (s == "Disease-Exam") return ContextType::disease_exam;
    if (s == "Disease-Treatment") return ContextType::disease_treatment;
    throw ValidationError("unknown context_type \"" + std::string(s) + "\"");
}

std::string to_string(QualityLabel q) { return q == QualityLabel::High ? "High" : "Low"; }

QualityLabel quality_label_from_string(std::string_view s) {
    if (s == "High") return QualityLabel::High;
    if (s == "Low") return QualityLabel::Low;
    throw ValidationError("unknown quality label \"" + std::string(s) + "\"");
}

// ---------------------------------------------------------------------------
// Fact base

FactBase FactBase::from_facts(std::vector<ContextFact> facts) {
    FactBase fb;
    fb.facts_ = std::move(facts);
    std::map<std::string, std::string> titles;
    for (std::size_t i = 0; i < fb.facts_.size(); ++i) {
        const auto& f = fb.facts_[i];
        if (f.id.empty()) throw ValidationError("context fact with empty id");
        if (!fb.index_.emplace(f.id, i).second) {
            throw ValidationError("duplicate context fact id \"" + f.id + "\"");
        }
        auto [it, inserted] = titles.emplace(normalize_for_match(f.title), f.id);
        if (!inserted) {
            throw ValidationError("duplicate context fact title \"" + f.title + "\"");
        }
    }
    return fb;
}

FactBase FactBase::from_json(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed fact base JSON at byte " + std::to_string(e.byte) + ": " +
                         e.what(), e.byte);
    }
    if (!root.is_array()) throw ValidationError("fact base must be a JSON array");
    std::vector<ContextFact> facts;
    facts.reserve(root.size());
    for (const auto& f : root) {
        ContextFact fact;
        fact.id = f.at("id").get<std::string>();
        fact.title = f.at("title").get<std::string>();
        fact.report_class = fact_report_class_from_string(f.at("report_class").get<std::string>());
        fact.context_type = context_type_from_string(f.at("context_type").get<std::string>());
        fact.description = f.at("description").get<std::string>();
        facts.push_back(std::move(fact));
    }
    return from_facts(std::move(facts));
}

const ContextFact& FactBase::by_id(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("unknown context fact id \"" + id + "\"");
    return facts_[it->second];
}

bool FactBase::contains(const std::string& id) const { return index_.count(id) > 0; }

std::string FactBase::to_json() const {
    json root = json::array();
    for (const auto& f : facts_) {
        root.push_back({{"id", f.id},
                        {"title", f.title},
                        {"report_class", to_string(f.report_class)},
                        {"context_type", to_string(f.context_type)},
                        {"description", f.description}});
    }
    return root.dump();
}

// ---------------------------------------------------------------------------
// Synonym schema

SynonymSchema SynonymSchema::from_entries(
    const std::map<std::string, std::vector<std::string>>& entries) {
    SynonymSchema schema;
    schema.entries_ = entries;
    for (const auto& [canonical, synonyms] : entries) {
        if (canonical.empty()) throw ValidationError("empty canonical term");
        auto add = [&](const std::string& term) {
            const std::string norm = normalize_for_match(term);
            if (norm.empty()) throw ValidationError("empty synonym for \"" + canonical + "\"");
            auto [it, inserted] = schema.normalized_to_canonical_.emplace(norm, canonical);
            if (!inserted && it->second != canonical) {
                throw ValidationError("synonym \"" + term + "\" maps to both \"" + it->second +
                                      "\" and \"" + canonical + "\"");
            }
        };
        add(canonical);
        for (const auto& s : synonyms) add(s);
    }
    return schema;
}

SynonymSchema SynonymSchema::from_json(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed synonym schema JSON at byte " + std::to_string(e.byte) + ": " +
                         e.what(), e.byte);
    }
    if (!root.is_object()) throw ValidationError("synonym schema must be a JSON object");
    std::map<std::string, std::vector<std::string>> entries;
    for (auto it = root.begin(); it != root.end(); ++it) {
        if (!it.value().is_array()) {
            throw ValidationError("synonyms of \"" + it.key() + "\" must be an array");
        }
        entries[it.key()] = it.value().get<std::vector<std::string>>();
    }
    return from_entries(entries);
}

const SynonymSchema& SynonymSchema::builtin() {
    static const SynonymSchema schema = from_entries({
        {"Name", {"Patient"}},
        {"Age", {"Date of Birth"}},
        {"Date",
         {"Examination Date", "Test Date", "Report Date", "Writing Date", "Date Received",
          "Audit Date", "Submission Time", "Specimen Acceptance Time"}},
        {"pre-test Diagnosis", {"Clinical Diagnosis"}},
        {"Item", {"Examination Item", "Test Item", "Indicator", "Laboratory Indicator"}},
        {"Result", {"Examination Result", "Laboratory Result", "Test Result"}},
        {"Range", {"Reference Range", "Normal Range", "Standard Range", "Normal Interval"}},
        {"Description",
         {"CT Appearance", "Cystoscopy Description", "Endoscopic Description",
          "Ultrasound Description", "Ultrasound Findings", "Ultrasound Contrast", "TRUS",
          "Frozen Section", "Immunohistochemistry", "Macroscopic Examination",
          "Microscopic Findings", "Radiological Appearance", "Imaging Appearance",
          "Observation Records", "Examination Findings", "Inspection Findings",
          "Film Indication", "Impression Note"}},
        {"Conclusion",
         {"CT Diagnosis", "CT Impression", "Pathological Diagnosis",
          "Supplementary Pathological Diagnosis", "Comprehensive Evaluation",
          "Radiological Diagnosis", "Imaging Diagnosis", "Imaging Conclusion",
          "Examination Diagnosis", "Imaging Findings", "Conclusions and Recommendations",
          "Diagnosis", "Diagnostic Opinion", "Impression"}},
    });
    return schema;
}

std::optional<std::string> SynonymSchema::lookup(std::string_view term) const {
    auto it = normalized_to_canonical_.find(normalize_for_match(term));
    if (it == normalized_to_canonical_.end()) return std::nullopt;
    return it->second;
}

const std::vector<std::string>& SynonymSchema::synonyms_of(const std::string& canonical) const {
    static const std::vector<std::string> empty;
    auto it = entries_.find(canonical);
    return it == entries_.end() ? empty : it->second;
}

bool SynonymSchema::has_canonical(const std::string& canonical) const {
    return entries_.count(canonical) > 0;
}

std::vector<std::string> SynonymSchema::canonical_terms() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

std::string SynonymSchema::to_json() const {
    json root = json::object();
    for (const auto& [k, v] : entries_) root[k] = v;
    return root.dump();
}

// ---------------------------------------------------------------------------
// Report annotation

void ReportAnnotation::validate() const {
    if (image_id.empty()) throw ValidationError("annotation with empty image_id");
    if (report_class == ReportClass::laboratory && kv_pairs.empty() && quadruplets.empty()) {
        throw ValidationError(image_id + ": laboratory report with no kv pairs and no table");
    }
}

ReportAnnotation parse_annotation_json(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed annotation JSON at byte " + std::to_string(e.byte) + ": " +
                         e.what(), e.byte);
    }
    ReportAnnotation ann;
    ann.image_id = root.at("image_id").get<std::string>();
    ann.report_class = report_class_from_string(root.at("report_class").get<std::string>());
    for (const auto& kv : root.value("kv", json::array())) {
        KeyValuePair pair;
        pair.key = kv.at("key").get<std::string>();
        pair.value = kv.at("value").get<std::string>();
        ann.kv_pairs.push_back(std::move(pair));
    }
    for (const auto& row : root.value("table", json::array())) {
        Quadruplet q;
        q.item = row.at("item").get<std::string>();
        q.result = row.at("result").get<std::string>();
        q.range = row.at("range").get<std::string>();
        q.flag = abnormal_flag_from_string(row.at("flag").get<std::string>());
        ann.quadruplets.push_back(std::move(q));
    }
    if (root.contains("context_refs")) {
        const auto& refs = root["context_refs"];
        ann.context_refs.diagnosis =
            refs.value("diagnosis", std::vector<std::string>{});
        ann.context_refs.status = refs.value("status", std::vector<std::string>{});
        ann.context_refs.advice = refs.value("advice", std::vector<std::string>{});
    }
    ann.quality = quality_label_from_string(root.at("quality").get<std::string>());
    ann.image_type = image_type_from_string(root.at("image_type").get<std::string>());
    if (root.contains("declared_item_count") && !root["declared_item_count"].is_null()) {
        ann.declared_item_count = root["declared_item_count"].get<int>();
    }
    ann.validate();
    return ann;
}

std::string serialize_annotation_json(const ReportAnnotation& ann) {
    json root;
    root["image_id"] = ann.image_id;
    root["report_class"] = to_string(ann.report_class);
    root["kv"] = json::array();
    for (const auto& kv : ann.kv_pairs) {
        root["kv"].push_back({{"key", kv.key}, {"value", kv.value}});
    }
    root["table"] = json::array();
    for (const auto& q : ann.quadruplets) {
        root["table"].push_back({{"item", q.item},
                                 {"result", q.result},
                                 {"range", q.range},
                                 {"flag", to_string(q.flag)}});
    }
    root["context_refs"] = {{"diagnosis", ann.context_refs.diagnosis},
                            {"status", ann.context_refs.status},
                            {"advice", ann.context_refs.advice}};
    root["quality"] = to_string(ann.quality);
    root["image_type"] = to_string(ann.image_type);
    if (ann.declared_item_count) root["declared_item_count"] = *ann.declared_item_count;
    return root.dump();
}

// ---------------------------------------------------------------------------
// Canonicalization and range logic

CanonicalKey canonicalize(std::string_view key, const SynonymSchema& schema) {
    if (auto canonical = schema.lookup(key)) return {*canonical, true};
    return {std::string(key), false};
}

namespace {

bool try_split_interval(const std::string& norm, RangeSpec& out) {
    // Byte offsets of candidate separators; the en dash is 3 bytes.
    struct Sep {
        std::size_t pos;
        std::size_t len;
    };
    std::vector<Sep> seps;
    for (std::size_t i = 1; i + 1 < norm.size(); ++i) {
        if (norm[i] == '-' || norm[i] == '~') seps.push_back({i, 1});
        if (i + 3 <= norm.size() && norm.compare(i, 3, "\xE2\x80\x93") == 0) {
            seps.push_back({i, 3});
        }
    }
    for (const auto& sep : seps) {
        const auto lo = parse_number(norm.substr(0, sep.pos));
        const auto hi = parse_number(norm.substr(sep.pos + sep.len));
        if (lo && hi && *lo <= *hi) {
            out.kind = RangeKind::closed_interval;
            out.lo = lo;
            out.hi = hi;
            return true;
        }
    }
    return false;
}

}  // namespace

RangeSpec parse_range(std::string_view raw) {
    const std::string norm = normalize_for_match(raw);
    if (norm.empty()) throw Error("empty reference range");

    RangeSpec spec;
    auto bounded = [&](std::string_view prefix, RangeKind kind) -> bool {
        if (norm.size() <= prefix.size() || norm.compare(0, prefix.size(), prefix) != 0)
            return false;
        const auto v = parse_number(norm.substr(prefix.size()));
        if (!v) return false;
        spec.kind = kind;
        if (kind == RangeKind::upper_only) spec.hi = v;
        else spec.lo = v;
        return true;
    };

    if (bounded("<=", RangeKind::upper_only) || bounded("\xE2\x89\xA4", RangeKind::upper_only) ||
        bounded("<", RangeKind::upper_only)) {
        return spec;
    }
    if (bounded(">=", RangeKind::lower_only) || bounded("\xE2\x89\xA5", RangeKind::lower_only) ||
        bounded(">", RangeKind::lower_only)) {
        return spec;
    }
    if (try_split_interval(norm, spec)) return spec;
    if (!contains_digit(norm)) {
        spec.kind = RangeKind::qualitative;
        spec.qualitative_expected = norm;
        return spec;
    }
    throw Error("unparseable reference range \"" + std::string(raw) + "\"");
}

AbnormalFlag check_abnormal(std::string_view result, const RangeSpec& spec) {
    if (spec.kind == RangeKind::qualitative) {
        const std::string norm = normalize_for_match(result);
        return norm == spec.qualitative_expected.value_or("") ? AbnormalFlag::Normal
                                                              : AbnormalFlag::High;
    }
    const auto v = parse_number(result);
    if (!v) return AbnormalFlag::Undetermined;
    switch (spec.kind) {
        case RangeKind::closed_interval:
            if (*v < *spec.lo) return AbnormalFlag::Low;
            if (*v > *spec.hi) return AbnormalFlag::High;
            return AbnormalFlag::Normal;
        case RangeKind::upper_only:
            return *v > *spec.hi ? AbnormalFlag::High : AbnormalFlag::Normal;
        case RangeKind::lower_only:
            return *v < *spec.lo ? AbnormalFlag::Low : AbnormalFlag::Normal;
        case RangeKind::qualitative:
            break;
    }
    return AbnormalFlag::Undetermined;
}

AbnormalFlag recompute_flag(std::string_view result, std::string_view raw_range) {
    RangeSpec spec;
    try {
        spec = parse_range(raw_range);
    } catch (const Error&) {
        return AbnormalFlag::Undetermined;
    }
    return check_abnormal(result, spec);
}

}  // namespace reportqa
