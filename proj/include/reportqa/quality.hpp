#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reportqa/annotation.hpp"

namespace reportqa {

enum class IssueCode {
    missing_key,
    missing_value,
    table_count_mismatch,
    abnormal_flag_mismatch,
    unmapped_key,
};

enum class Severity { error, warning };

std::string to_string(IssueCode c);
IssueCode issue_code_from_string(std::string_view s);
std::string to_string(Severity s);

// Severity is a function of the code.
Severity issue_severity(IssueCode code);

struct Issue {
    std::string image_id;
    Severity severity = Severity::warning;
    IssueCode code = IssueCode::unmapped_key;
    std::string detail;
};

std::string serialize_issues_json(const std::vector<Issue>& issues);

// Re-derives everything derivable and reports every disagreement:
// blank keys/values, a declared table size that disagrees with the
// quadruplet count, stored abnormal flags that do not match
// recompute_flag, and keys the schema cannot map.
std::vector<Issue> validate_annotation(const ReportAnnotation& ann, const SynonymSchema& schema);

struct Point {
    double x = 0;
    double y = 0;
};

// Detected page corners, at most four, in no particular order.
struct CornerSet {
    std::vector<Point> corners;
};

enum class Completeness { complete, incomplete };
enum class Skew { straight, skewed };

// The page is incomplete when fewer than three corners were detected.
Completeness classify_completeness(const CornerSet& corners);

enum class SkewAxis { top_bottom, left_right };

// Angle in degrees between the two opposing page edges, in [0, 90].
// Needs all four corners; anything else is indeterminate.
std::optional<double> edge_angle_degrees(const CornerSet& corners,
                                         SkewAxis axis = SkewAxis::top_bottom);

// Skewed when the opposing edges diverge by more than 15 degrees.
// Indeterminate corner sets count as straight; completeness already
// covers them.
Skew classify_skew(const CornerSet& corners, SkewAxis axis = SkewAxis::top_bottom);

// Low quality when the page is incomplete or skewed.
QualityLabel classify_quality(const CornerSet& corners, SkewAxis axis = SkewAxis::top_bottom);

}  // namespace reportqa
