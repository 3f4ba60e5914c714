#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reportqa/ocr.hpp"

namespace reportqa {

struct RestoreParams {
    // Discount applied to a segment's vertical band when deciding whether
    // its neighbour sits on the same text line; the band keeps its central
    // (1 - r) fraction. 0.15 works well for both electronic and
    // photographed reports.
    double line_tolerance = 0.15;
    // Expansion coefficient for inter-segment spacing: a horizontal gap of
    // h pixels becomes max(round(h / (char_width * l)), 1) spaces.
    double space_expansion = 0.7;
    // Cluster count for the bbox-height grouping that selects the body-text
    // population used to estimate average character width.
    int height_clusters = 3;
    int kmeans_max_iters = 50;
    std::uint64_t seed = 0;
    ReadingOrder reading_order = ReadingOrder::row_major;

    void validate() const;
};

struct Line {
    std::vector<TextSegment> segments;  // ascending x0
    int index = 0;
};

struct SegmentPlacement {
    int line = 0;    // 0-based output row
    int column = 0;  // character column of the segment's first glyph
};

struct RestoredText {
    std::string text;  // rows joined by '\n'
    double char_width = 0;
    // Indexed by the segment's position in the input document.
    std::vector<SegmentPlacement> line_map;
};

// True when two vertically adjacent segments belong to the same text line:
// the vertical midpoint of either box falls strictly inside the other
// box's band after that band has been shrunk by r times the tested box's
// height (half the shrink on each side).
bool segments_share_line(const BBox& a, const BBox& b, double line_tolerance);

// Splits a reading-ordered segment stream into lines: a new line starts
// wherever consecutive segments fail the shared-line test. Segments are
// re-sorted by x0 within each line.
std::vector<Line> partition_lines(const std::vector<TextSegment>& reading_ordered,
                                  double line_tolerance);

// Average character width over the dominant height cluster: bbox heights
// are k-means clustered, the cluster holding the most characters wins
// (ties: smaller mean height), and the estimate is that cluster's summed
// width divided by its summed character count.
double estimate_char_width(const std::vector<Line>& lines, const RestoreParams& params);

// Joins one line's segments with proportional spaces. Gaps are measured
// between adjacent segments after x-sorting and clamped at zero; every
// boundary gets at least one space.
std::string join_line(const Line& line, double char_width, double space_expansion);

int spaces_for_gap(double gap, double char_width, double space_expansion);

RestoredText restore(const OcrDocument& doc, const RestoreParams& params = {});

}  // namespace reportqa
