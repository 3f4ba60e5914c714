#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reportqa {

// Axis-aligned rectangle in pixel space, y growing downward.
struct BBox {
    double x0 = 0;  // left
    double x1 = 0;  // right
    double y0 = 0;  // top
    double y1 = 0;  // bottom

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double mid_y() const { return 0.5 * (y0 + y1); }

    // Degenerate boxes are accepted on input and treated as one pixel
    // wide/tall wherever the geometry feeds arithmetic.
    double effective_width() const { return width() > 0 ? width() : 1.0; }
    double effective_height() const { return height() > 0 ? height() : 1.0; }

    bool operator==(const BBox&) const = default;
};

struct TextSegment {
    std::string text;
    BBox bbox;

    bool operator==(const TextSegment&) const = default;
};

enum class ImageType { photo, scanned_pdf, screenshot };

std::string to_string(ImageType t);
ImageType image_type_from_string(std::string_view s);

struct OcrDocument {
    std::string image_id;
    ImageType image_type = ImageType::scanned_pdf;
    std::optional<double> page_width;
    std::optional<double> page_height;
    std::vector<TextSegment> segments;
};

struct ParseOptions {
    // Rejects files whose coordinates look like [x0, y0, x1, y1] order
    // (x1 < y0 for more than 90% of segments).
    bool strict_bbox_order = false;
};

// Throws ParseError (with byte offset) on malformed JSON and
// ValidationError (naming the segment index) on schema violations.
OcrDocument parse_ocr_json(std::string_view bytes, const ParseOptions& opts = {});
std::string serialize_ocr_json(const OcrDocument& doc);

enum class ReadingOrder {
    row_major,     // ascending y0, then ascending x0
    column_major,  // ascending x0, then ascending y0
};

std::vector<TextSegment> sort_reading_order(std::vector<TextSegment> segments,
                                            ReadingOrder order = ReadingOrder::row_major);

// Same ordering, expressed as a permutation of input indices. Stable, so
// repeated application is a fixed point.
std::vector<std::size_t> reading_order_permutation(const std::vector<TextSegment>& segments,
                                                   ReadingOrder order = ReadingOrder::row_major);

}  // namespace reportqa
