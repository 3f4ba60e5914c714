#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reportqa/ocr.hpp"

namespace reportqa {

enum class AbnormalFlag { Normal, High, Low, Undetermined };

std::string to_string(AbnormalFlag f);
AbnormalFlag abnormal_flag_from_string(std::string_view s);

enum class RangeKind { closed_interval, lower_only, upper_only, qualitative };

struct RangeSpec {
    RangeKind kind = RangeKind::qualitative;
    std::optional<double> lo;
    std::optional<double> hi;
    // Normalized token a non-numeric result must equal to count as normal.
    std::optional<std::string> qualitative_expected;
};

struct KeyValuePair {
    std::string key;
    std::string value;
    std::optional<std::string> canonical_key;
};

struct Quadruplet {
    std::string item;
    std::string result;
    std::string range;  // raw string as printed on the report
    AbnormalFlag flag = AbnormalFlag::Undetermined;
};

enum class ReportClass { laboratory, diagnostic };
std::string to_string(ReportClass c);
ReportClass report_class_from_string(std::string_view s);

enum class FactReportClass { laboratory, clinical };
std::string to_string(FactReportClass c);
FactReportClass fact_report_class_from_string(std::string_view s);

enum class ContextType {
    exam_disease,
    exam_status,
    disease_status,
    disease_advice,
    exam,
    disease_exam,
    disease_treatment,
};
std::string to_string(ContextType t);
ContextType context_type_from_string(std::string_view s);

struct ContextFact {
    std::string id;
    std::string title;
    FactReportClass report_class = FactReportClass::laboratory;
    ContextType context_type = ContextType::exam_disease;
    std::string description;
};

class FactBase {
public:
    static FactBase from_json(std::string_view bytes);
    static FactBase from_facts(std::vector<ContextFact> facts);

    const std::vector<ContextFact>& facts() const { return facts_; }
    const ContextFact& by_id(const std::string& id) const;  // throws on miss
    bool contains(const std::string& id) const;
    std::string to_json() const;

private:
    std::vector<ContextFact> facts_;
    std::map<std::string, std::size_t> index_;
};

class SynonymSchema {
public:
    // { "CanonicalTerm": ["synonym", ...], ... }. Every canonical term is
    // implicitly its own synonym; a synonym naming two canonical terms is
    // rejected.
    static SynonymSchema from_json(std::string_view bytes);
    static SynonymSchema from_entries(
        const std::map<std::string, std::vector<std::string>>& entries);

    // The vocabulary shipped with the toolkit, covering the common
    // report keys (dates, items, results, ranges, descriptions,
    // conclusions) and their observed variants.
    static const SynonymSchema& builtin();

    std::optional<std::string> lookup(std::string_view term) const;
    const std::vector<std::string>& synonyms_of(const std::string& canonical) const;
    bool has_canonical(const std::string& canonical) const;
    std::vector<std::string> canonical_terms() const;
    std::string to_json() const;

private:
    std::map<std::string, std::vector<std::string>> entries_;          // canonical -> synonyms
    std::map<std::string, std::string> normalized_to_canonical_;
};

struct ContextRefs {
    std::vector<std::string> diagnosis;
    std::vector<std::string> status;
    std::vector<std::string> advice;
};

enum class QualityLabel { High, Low };
std::string to_string(QualityLabel q);
QualityLabel quality_label_from_string(std::string_view s);

struct ReportAnnotation {
    std::string image_id;
    ReportClass report_class = ReportClass::laboratory;
    std::vector<KeyValuePair> kv_pairs;
    std::vector<Quadruplet> quadruplets;
    ContextRefs context_refs;
    QualityLabel quality = QualityLabel::High;
    ImageType image_type = ImageType::scanned_pdf;
    // Item count printed on the report, when the annotator captured one;
    // checked against the quadruplet count by the quality tool.
    std::optional<int> declared_item_count;

    void validate() const;  // throws ValidationError
};

ReportAnnotation parse_annotation_json(std::string_view bytes);
std::string serialize_annotation_json(const ReportAnnotation& ann);

struct CanonicalKey {
    std::string key;   // canonical term, or the input unchanged
    bool mapped = false;
};

// Exact lookup after width/whitespace normalization; unknown keys come
// back unchanged with mapped=false.
CanonicalKey canonicalize(std::string_view key, const SynonymSchema& schema);

// Recognizes "a-b" (also en dash and '~'), "<b"/"<=b", ">a"/">=a" and
// bare qualitative tokens such as "negative". Throws Error on anything
// else; callers map that to AbnormalFlag::Undetermined.
RangeSpec parse_range(std::string_view raw);

// Inclusive bounds: results sitting exactly on lo or hi are Normal.
AbnormalFlag check_abnormal(std::string_view result, const RangeSpec& spec);

// parse_range + check_abnormal with unparseable ranges or empty input
// collapsing to Undetermined, which is how annotations are re-verified.
AbnormalFlag recompute_flag(std::string_view result, std::string_view raw_range);

}  // namespace reportqa
