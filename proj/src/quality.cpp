#include "reportqa/quality.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "reportqa/error.hpp"
#include "reportqa/textutil.hpp"

namespace reportqa {

using nlohmann::json;

std::string to_string(IssueCode c) {
    switch (c) {
        case IssueCode::missing_key: return "missing_key";
        case IssueCode::missing_value: return "missing_value";
        case IssueCode::table_count_mismatch: return "table_count_mismatch";
        case IssueCode::abnormal_flag_mismatch: return "abnormal_flag_mismatch";
        case IssueCode::unmapped_key: return "unmapped_key";
    }
    return "unmapped_key";
}

IssueCode issue_code_from_string(std::string_view s) {
    if (s == "missing_key") return IssueCode::missing_key;
    if (s == "missing_value") return IssueCode::missing_value;
    if (s == "table_count_mismatch") return IssueCode::table_count_mismatch;
    if (s == "abnormal_flag_mismatch") return IssueCode::abnormal_flag_mismatch;
    if (s == "unmapped_key") return IssueCode::unmapped_key;
    throw ValidationError("unknown issue code \"" + std::string(s) + "\"");
}

std::string to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

Severity issue_severity(IssueCode code) {
    switch (code) {
        case IssueCode::missing_key: return Severity::error;
        case IssueCode::missing_value: return Severity::warning;
        case IssueCode::table_count_mismatch: return Severity::error;
        case IssueCode::abnormal_flag_mismatch: return Severity::error;
        case IssueCode::unmapped_key: return Severity::warning;
    }
    return Severity::warning;
}

std::string serialize_issues_json(const std::vector<Issue>& issues) {
    json root = json::array();
    for (const auto& issue : issues) {
        root.push_back({{"image_id", issue.image_id},
                        {"severity", to_string(issue.severity)},
                        {"code", to_string(issue.code)},
                        {"detail", issue.detail}});
    }
    return root.dump(2);
}

namespace {

bool blank(const std::string& s) { return normalize_for_match(s).empty(); }

Issue make_issue(const std::string& image_id, IssueCode code, std::string detail) {
    return Issue{image_id, issue_severity(code), code, std::move(detail)};
}

}  // namespace

std::vector<Issue> validate_annotation(const ReportAnnotation& ann, const SynonymSchema& schema) {
    std::vector<Issue> issues;

    for (std::size_t i = 0; i < ann.kv_pairs.size(); ++i) {
        const auto& kv = ann.kv_pairs[i];
        if (blank(kv.key)) {
            issues.push_back(
                make_issue(ann.image_id, IssueCode::missing_key, "kv[" + std::to_string(i) + "]"));
            continue;
        }
        if (blank(kv.value)) {
            issues.push_back(make_issue(ann.image_id, IssueCode::missing_value,
                                        "kv[" + std::to_string(i) + "] key \"" + kv.key + "\""));
        }
        if (!canonicalize(kv.key, schema).mapped) {
            issues.push_back(make_issue(ann.image_id, IssueCode::unmapped_key,
                                        "kv[" + std::to_string(i) + "] key \"" + kv.key + "\""));
        }
    }

    if (ann.declared_item_count &&
        *ann.declared_item_count != static_cast<int>(ann.quadruplets.size())) {
        issues.push_back(make_issue(
            ann.image_id, IssueCode::table_count_mismatch,
            "declared " + std::to_string(*ann.declared_item_count) + " items, table has " +
                std::to_string(ann.quadruplets.size())));
    }

    for (std::size_t i = 0; i < ann.quadruplets.size(); ++i) {
        const auto& q = ann.quadruplets[i];
        if (blank(q.item)) {
            issues.push_back(make_issue(ann.image_id, IssueCode::missing_key,
                                        "table[" + std::to_string(i) + "] item"));
        }
        if (blank(q.result)) {
            issues.push_back(make_issue(ann.image_id, IssueCode::missing_value,
                                        "table[" + std::to_string(i) + "] result of \"" + q.item +
                                            "\""));
        }
        const AbnormalFlag expected = recompute_flag(q.result, q.range);
        if (expected != q.flag) {
            issues.push_back(make_issue(
                ann.image_id, IssueCode::abnormal_flag_mismatch,
                "table[" + std::to_string(i) + "] \"" + q.item + "\": stored " +
                    to_string(q.flag) + ", recomputed " + to_string(expected)));
        }
    }
    return issues;
}

// ---------------------------------------------------------------------------
// Corner sensors

Completeness classify_completeness(const CornerSet& corners) {
    return corners.corners.size() < 3 ? Completeness::incomplete : Completeness::complete;
}

std::optional<double> edge_angle_degrees(const CornerSet& corners, SkewAxis axis) {
    if (corners.corners.size() != 4) return std::nullopt;
    std::vector<Point> pts = corners.corners;
    if (axis == SkewAxis::top_bottom) {
        // Top pair first (smaller y), left before right within a pair.
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
            if (a.y != b.y) return a.y < b.y;
            return a.x < b.x;
        });
        if (pts[0].x > pts[1].x) std::swap(pts[0], pts[1]);
        if (pts[2].x > pts[3].x) std::swap(pts[2], pts[3]);
    } else {
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
            if (a.x != b.x) return a.x < b.x;
            return a.y < b.y;
        });
        if (pts[0].y > pts[1].y) std::swap(pts[0], pts[1]);
        if (pts[2].y > pts[3].y) std::swap(pts[2], pts[3]);
    }
    const double a1 = std::atan2(pts[1].y - pts[0].y, pts[1].x - pts[0].x);
    const double a2 = std::atan2(pts[3].y - pts[2].y, pts[3].x - pts[2].x);
    double deg = std::abs(a1 - a2) * 180.0 / M_PI;
    deg = std::fmod(deg, 180.0);
    if (deg > 90.0) deg = 180.0 - deg;
    return deg;
}

Skew classify_skew(const CornerSet& corners, SkewAxis axis) {
    const auto angle = edge_angle_degrees(corners, axis);
    if (!angle) return Skew::straight;
    // Strictly greater than 15 degrees; the tiny slack keeps boundary
    // inputs reconstructed through atan2 from flipping on rounding.
    return *angle > 15.0 + 1e-9 ? Skew::skewed : Skew::straight;
}

QualityLabel classify_quality(const CornerSet& corners, SkewAxis axis) {
    if (classify_completeness(corners) == Completeness::incomplete) return QualityLabel::Low;
    if (classify_skew(corners, axis) == Skew::skewed) return QualityLabel::Low;
    return QualityLabel::High;
}

}  // namespace reportqa
