#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reportqa/quality.hpp"
#include "reportqa/rng.hpp"
#include "support/fixtures.hpp"

using namespace reportqa;
using reportqa::testing::consistent_lab_annotation;

namespace {

bool has_code(const std::vector<Issue>& issues, IssueCode code) {
    for (const auto& issue : issues) {
        if (issue.code == code) return true;
    }
    return false;
}

CornerSet rect_with_bottom_angle(double degrees, std::size_t keep = 4) {
    const double rad = degrees * M_PI / 180.0;
    CornerSet corners;
    corners.corners = {
        {0, 0},
        {100, 0},
        {0, 100},
        {100 * std::cos(rad), 100 + 100 * std::sin(rad)},
    };
    corners.corners.resize(keep);
    return corners;
}

}  // namespace

TEST_CASE("a stored Normal flag that recomputes High is an error") {
    ReportAnnotation ann = consistent_lab_annotation();
    ann.quadruplets[1].flag = AbnormalFlag::Normal;  // 10.2 vs 3.5-9.5 recomputes High
    const auto issues = validate_annotation(ann, SynonymSchema::builtin());
    CHECK(has_code(issues, IssueCode::abnormal_flag_mismatch));
    for (const auto& issue : issues) {
        if (issue.code == IssueCode::abnormal_flag_mismatch) {
            CHECK(issue.severity == Severity::error);
            CHECK(issue.detail.find("High") != std::string::npos);
        }
    }
}

TEST_CASE("a fully consistent annotation has no issues") {
    const auto issues = validate_annotation(consistent_lab_annotation(), SynonymSchema::builtin());
    CHECK(issues.empty());
}

TEST_CASE("every injected corruption is reported with the matching code") {
    Rng rng(31);
    int covered[5] = {0, 0, 0, 0, 0};
    for (int trial = 0; trial < 500; ++trial) {
        ReportAnnotation ann = consistent_lab_annotation();
        const int kind = static_cast<int>(rng.next_below(5));
        IssueCode expected;
        switch (kind) {
            case 0:
                ann.kv_pairs[rng.next_below(ann.kv_pairs.size())].key = "  ";
                expected = IssueCode::missing_key;
                break;
            case 1:
                ann.kv_pairs[rng.next_below(ann.kv_pairs.size())].value = "";
                expected = IssueCode::missing_value;
                break;
            case 2: {
                // Flip a correct flag on a row whose range is parseable.
                auto& q = ann.quadruplets[rng.next_below(3)];
                q.flag = q.flag == AbnormalFlag::Normal ? AbnormalFlag::High : AbnormalFlag::Normal;
                expected = IssueCode::abnormal_flag_mismatch;
                break;
            }
            case 3:
                ann.declared_item_count = static_cast<int>(ann.quadruplets.size()) + 1 +
                                          static_cast<int>(rng.next_below(3));
                expected = IssueCode::table_count_mismatch;
                break;
            default:
                ann.kv_pairs[rng.next_below(ann.kv_pairs.size())].key = "ZZGARBLE";
                expected = IssueCode::unmapped_key;
                break;
        }
        const auto issues = validate_annotation(ann, SynonymSchema::builtin());
        CHECK(has_code(issues, expected));
        ++covered[kind];
    }
    for (int k = 0; k < 5; ++k) CHECK(covered[k] > 0);
}

TEST_CASE("applying the recomputed flags repairs the annotation") {
    ReportAnnotation ann = consistent_lab_annotation();
    ann.quadruplets[0].flag = AbnormalFlag::High;
    ann.quadruplets[2].flag = AbnormalFlag::Normal;
    for (auto& q : ann.quadruplets) q.flag = recompute_flag(q.result, q.range);
    const auto issues = validate_annotation(ann, SynonymSchema::builtin());
    CHECK_FALSE(has_code(issues, IssueCode::abnormal_flag_mismatch));
}

TEST_CASE("completeness needs at least three corners") {
    CHECK(classify_completeness(rect_with_bottom_angle(0, 4)) == Completeness::complete);
    CHECK(classify_completeness(rect_with_bottom_angle(0, 3)) == Completeness::complete);
    CHECK(classify_completeness(rect_with_bottom_angle(0, 2)) == Completeness::incomplete);
    CHECK(classify_completeness(CornerSet{}) == Completeness::incomplete);
}

TEST_CASE("skew compares the top and bottom edges") {
    CHECK(classify_skew(rect_with_bottom_angle(0)) == Skew::straight);
    CHECK(classify_skew(rect_with_bottom_angle(20)) == Skew::skewed);
    // Strictly greater than 15 degrees.
    CHECK(classify_skew(rect_with_bottom_angle(15)) == Skew::straight);
    CHECK(classify_skew(rect_with_bottom_angle(16)) == Skew::skewed);
    // Fewer than four corners: indeterminate, treated straight.
    CHECK(classify_skew(rect_with_bottom_angle(30, 3)) == Skew::straight);
}

TEST_CASE("quality is low when incomplete or skewed") {
    CHECK(classify_quality(rect_with_bottom_angle(0, 4)) == QualityLabel::High);
    CHECK(classify_quality(rect_with_bottom_angle(45, 2)) == QualityLabel::Low);
    CHECK(classify_quality(rect_with_bottom_angle(20, 4)) == QualityLabel::Low);
}

TEST_CASE("quality equals the disjunction over the full sensor grid") {
    for (std::size_t count = 0; count <= 4; ++count) {
        for (int angle = 0; angle <= 45; ++angle) {
            const CornerSet corners = rect_with_bottom_angle(angle, count);
            const bool incomplete =
                classify_completeness(corners) == Completeness::incomplete;
            const bool skewed = classify_skew(corners) == Skew::skewed;
            const QualityLabel quality = classify_quality(corners);
            CHECK((quality == QualityLabel::Low) == (incomplete || skewed));
            CHECK(incomplete == (count < 3));
            CHECK(skewed == (count == 4 && angle > 15));
        }
    }
}

TEST_CASE("left-right axis measures the side edges") {
    // The right edge leans out by ~19 degrees while top and bottom stay
    // parallel: only the left-right reading calls it skewed.
    CornerSet corners;
    corners.corners = {{0, 0}, {100, 0}, {0, 100}, {135, 100}};
    CHECK(classify_skew(corners, SkewAxis::top_bottom) == Skew::straight);
    CHECK(classify_skew(corners, SkewAxis::left_right) == Skew::skewed);
    const auto angle = edge_angle_degrees(corners, SkewAxis::left_right);
    REQUIRE(angle.has_value());
    CHECK(*angle == doctest::Approx(19.29).epsilon(0.01));
}

TEST_CASE("corner order does not matter") {
    CornerSet shuffled;
    shuffled.corners = {{100, 0}, {0, 100}, {100, 100}, {0, 0}};
    CHECK(classify_skew(shuffled) == Skew::straight);
    CHECK(classify_quality(shuffled) == QualityLabel::High);
}

TEST_CASE("severity is a function of the code") {
    CHECK(issue_severity(IssueCode::abnormal_flag_mismatch) == Severity::error);
    CHECK(issue_severity(IssueCode::missing_key) == Severity::error);
    CHECK(issue_severity(IssueCode::table_count_mismatch) == Severity::error);
    CHECK(issue_severity(IssueCode::unmapped_key) == Severity::warning);
    CHECK(issue_severity(IssueCode::missing_value) == Severity::warning);
}

TEST_CASE("issues serialize to a flat JSON list") {
    ReportAnnotation ann = consistent_lab_annotation();
    ann.quadruplets[1].flag = AbnormalFlag::Normal;
    const auto issues = validate_annotation(ann, SynonymSchema::builtin());
    const std::string json = serialize_issues_json(issues);
    CHECK(json.find("abnormal_flag_mismatch") != std::string::npos);
    CHECK(json.find(ann.image_id) != std::string::npos);
}
