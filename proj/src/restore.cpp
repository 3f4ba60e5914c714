#include "reportqa/restore.hpp"

#include <algorithm>
#include <cmath>

#include "reportqa/error.hpp"
#include "reportqa/kmeans1d.hpp"
#include "reportqa/rng.hpp"
#include "reportqa/textutil.hpp"

namespace reportqa {

void RestoreParams::validate() const {
    if (line_tolerance < 0 || line_tolerance > 1) {
        throw ValidationError("line tolerance (r) must be in [0, 1]");
    }
    if (space_expansion <= 0 || space_expansion > 1) {
        throw ValidationError("space expansion (l) must be in (0, 1]");
    }
    if (height_clusters < 1) throw ValidationError("height clusters (k) must be >= 1");
    if (kmeans_max_iters < 1) throw ValidationError("kmeans max iters must be >= 1");
}

namespace {

// Band of a box with degenerate heights widened to one pixel around the
// midpoint, so zero-height OCR output still partitions sanely.
struct Band {
    double lo;
    double hi;
    double mid;
    double height;
};

Band band_of(const BBox& b) {
    Band band;
    band.mid = b.mid_y();
    band.height = b.effective_height();
    if (b.height() > 0) {
        band.lo = b.y0;
        band.hi = b.y1;
    } else {
        band.lo = band.mid - 0.5;
        band.hi = band.mid + 0.5;
    }
    return band;
}

bool mid_inside_shrunk(double mid, const Band& band, double shrink) {
    const double half = 0.5 * shrink;
    return band.lo + half < mid && mid < band.hi - half;
}

}  // namespace

bool segments_share_line(const BBox& a, const BBox& b, double line_tolerance) {
    const Band ba = band_of(a);
    const Band bb = band_of(b);
    const double eps_a = line_tolerance * ba.height;
    const double eps_b = line_tolerance * bb.height;
    return mid_inside_shrunk(bb.mid, ba, eps_b) || mid_inside_shrunk(ba.mid, bb, eps_a);
}

static std::vector<std::vector<std::size_t>> partition_indices(
    const std::vector<TextSegment>& ordered, double line_tolerance) {
    std::vector<std::vector<std::size_t>> lines;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (i == 0 || !segments_share_line(ordered[i - 1].bbox, ordered[i].bbox, line_tolerance)) {
            lines.emplace_back();
        }
        lines.back().push_back(i);
    }
    for (auto& line : lines) {
        std::stable_sort(line.begin(), line.end(), [&](std::size_t a, std::size_t b) {
            return ordered[a].bbox.x0 < ordered[b].bbox.x0;
        });
    }
    return lines;
}

std::vector<Line> partition_lines(const std::vector<TextSegment>& reading_ordered,
                                  double line_tolerance) {
    std::vector<Line> lines;
    for (const auto& idx_line : partition_indices(reading_ordered, line_tolerance)) {
        Line line;
        line.index = static_cast<int>(lines.size());
        for (std::size_t i : idx_line) line.segments.push_back(reading_ordered[i]);
        lines.push_back(std::move(line));
    }
    return lines;
}

double estimate_char_width(const std::vector<Line>& lines, const RestoreParams& params) {
    std::vector<double> heights;
    std::vector<double> widths;
    std::vector<double> chars;
    bool any_positive_width = false;
    for (const auto& line : lines) {
        for (const auto& seg : line.segments) {
            heights.push_back(seg.bbox.effective_height());
            widths.push_back(seg.bbox.effective_width());
            chars.push_back(static_cast<double>(codepoint_count(seg.text)));
            if (seg.bbox.width() > 0) any_positive_width = true;
        }
    }
    if (heights.empty() || !any_positive_width) {
        throw Error("cannot estimate character width: no segment with positive width");
    }

    // A lone segment needs no clustering; its own width/chars ratio is the
    // whole population.
    if (heights.size() == 1) return widths[0] / std::max(chars[0], 1.0);

    Rng rng(params.seed);
    const auto clustering = kmeans_1d(heights, static_cast<std::size_t>(params.height_clusters),
                                      static_cast<std::size_t>(params.kmeans_max_iters), rng);

    const std::size_t k = clustering.centers.size();
    std::vector<double> cluster_chars(k, 0.0);
    std::vector<double> cluster_widths(k, 0.0);
    std::vector<double> cluster_height_sum(k, 0.0);
    std::vector<std::size_t> cluster_n(k, 0);
    for (std::size_t i = 0; i < heights.size(); ++i) {
        const std::size_t c = clustering.assignment[i];
        cluster_chars[c] += chars[i];
        cluster_widths[c] += widths[i];
        cluster_height_sum[c] += heights[i];
        cluster_n[c] += 1;
    }

    std::size_t best = 0;
    bool found = false;
    for (std::size_t c = 0; c < k; ++c) {
        if (cluster_n[c] == 0) continue;
        if (!found) {
            best = c;
            found = true;
            continue;
        }
        const double mean_c = cluster_height_sum[c] / static_cast<double>(cluster_n[c]);
        const double mean_b = cluster_height_sum[best] / static_cast<double>(cluster_n[best]);
        // Ties on character mass go to the shorter population: body text
        // beats headings.
        if (cluster_chars[c] > cluster_chars[best] ||
            (cluster_chars[c] == cluster_chars[best] && mean_c < mean_b)) {
            best = c;
        }
    }
    if (cluster_chars[best] <= 0) throw Error("cannot estimate character width: empty texts");
    return cluster_widths[best] / cluster_chars[best];
}

int spaces_for_gap(double gap, double char_width, double space_expansion) {
    if (gap < 0) gap = 0;
    const double raw = gap / (char_width * space_expansion);
    const long long rounded = static_cast<long long>(std::floor(raw + 0.5));
    return static_cast<int>(std::max<long long>(rounded, 1));
}

std::string join_line(const Line& line, double char_width, double space_expansion) {
    std::string out;
    for (std::size_t i = 0; i < line.segments.size(); ++i) {
        if (i > 0) {
            const double gap = line.segments[i].bbox.x0 - line.segments[i - 1].bbox.x1;
            out.append(static_cast<std::size_t>(spaces_for_gap(gap, char_width, space_expansion)),
                       ' ');
        }
        out += line.segments[i].text;
    }
    return out;
}

RestoredText restore(const OcrDocument& doc, const RestoreParams& params) {
    params.validate();
    if (doc.segments.empty()) throw ValidationError("no segments");

    const auto perm = reading_order_permutation(doc.segments, params.reading_order);
    std::vector<TextSegment> ordered;
    ordered.reserve(perm.size());
    for (std::size_t i : perm) ordered.push_back(doc.segments[i]);

    const auto index_lines = partition_indices(ordered, params.line_tolerance);

    std::vector<Line> lines;
    lines.reserve(index_lines.size());
    for (const auto& idx_line : index_lines) {
        Line line;
        line.index = static_cast<int>(lines.size());
        for (std::size_t i : idx_line) line.segments.push_back(ordered[i]);
        lines.push_back(std::move(line));
    }

    RestoredText result;
    result.char_width = estimate_char_width(lines, params);
    result.line_map.resize(doc.segments.size());

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const Line& line = lines[li];
        if (li > 0) result.text += '\n';
        int column = 0;
        for (std::size_t si = 0; si < line.segments.size(); ++si) {
            if (si > 0) {
                const double gap = line.segments[si].bbox.x0 - line.segments[si - 1].bbox.x1;
                const int spaces =
                    spaces_for_gap(gap, result.char_width, params.space_expansion);
                result.text.append(static_cast<std::size_t>(spaces), ' ');
                column += spaces;
            }
            const std::size_t original = perm[index_lines[li][si]];
            result.line_map[original] = {static_cast<int>(li), column};
            result.text += line.segments[si].text;
            column += static_cast<int>(codepoint_count(line.segments[si].text));
        }
    }
    return result;
}

}  // namespace reportqa
