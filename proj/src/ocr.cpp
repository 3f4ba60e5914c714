#include "reportqa/ocr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "reportqa/error.hpp"
#include "reportqa/log.hpp"
#include "reportqa/textutil.hpp"

namespace reportqa {

using nlohmann::json;

std::string to_string(ImageType t) {
    switch (t) {
        case ImageType::photo: return "photo";
        case ImageType::scanned_pdf: return "scanned_pdf";
        case ImageType::screenshot: return "screenshot";
    }
    return "scanned_pdf";
}

ImageType image_type_from_string(std::string_view s) {
    if (s == "photo") return ImageType::photo;
    if (s == "scanned_pdf") return ImageType::scanned_pdf;
    if (s == "screenshot") return ImageType::screenshot;
    throw ValidationError("unknown image_type \"" + std::string(s) + "\"");
}

namespace {

bool has_visible_char(const std::string& text) {
    for (char32_t c : decode_utf8(text)) {
        if (!is_space_cp(c)) return true;
    }
    return false;
}

double require_finite(const json& v, const char* what, std::size_t seg_index) {
    if (!v.is_number()) {
        throw ValidationError(std::string(what) + " is not a number at segment " +
                              std::to_string(seg_index));
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ValidationError(std::string(what) + " is not finite at segment " +
                              std::to_string(seg_index));
    }
    return d;
}

}  // namespace

OcrDocument parse_ocr_json(std::string_view bytes, const ParseOptions& opts) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed OCR JSON at byte " + std::to_string(e.byte) + ": " + e.what(),
                         e.byte);
    }
    if (!root.is_object()) throw ValidationError("OCR document must be a JSON object");
    if (!root.contains("image_id") || !root["image_id"].is_string() ||
        root["image_id"].get<std::string>().empty()) {
        throw ValidationError("missing or empty image_id");
    }

    OcrDocument doc;
    doc.image_id = root["image_id"].get<std::string>();
    if (!root.contains("image_type") || !root["image_type"].is_string()) {
        throw ValidationError("missing image_type");
    }
    doc.image_type = image_type_from_string(root["image_type"].get<std::string>());
    if (root.contains("page_width") && !root["page_width"].is_null()) {
        doc.page_width = root["page_width"].get<double>();
    }
    if (root.contains("page_height") && !root["page_height"].is_null()) {
        doc.page_height = root["page_height"].get<double>();
    }

    if (!root.contains("segments") || !root["segments"].is_array()) {
        throw ValidationError("missing segments array");
    }
    const auto& segs = root["segments"];
    if (segs.empty()) throw ValidationError("no segments");

    std::size_t suspicious_order = 0;
    std::size_t degenerate = 0;
    doc.segments.reserve(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        if (!s.is_object() || !s.contains("text") || !s["text"].is_string()) {
            throw ValidationError("missing text at segment " + std::to_string(i));
        }
        TextSegment seg;
        seg.text = s["text"].get<std::string>();
        if (!has_visible_char(seg.text)) {
            throw ValidationError("empty text at segment " + std::to_string(i));
        }
        if (!s.contains("bbox") || !s["bbox"].is_array() || s["bbox"].size() != 4) {
            throw ValidationError("bbox must be [x0, x1, y0, y1] at segment " + std::to_string(i));
        }
        const auto& b = s["bbox"];
        seg.bbox.x0 = require_finite(b[0], "x0", i);
        seg.bbox.x1 = require_finite(b[1], "x1", i);
        seg.bbox.y0 = require_finite(b[2], "y0", i);
        seg.bbox.y1 = require_finite(b[3], "y1", i);
        if (seg.bbox.x0 < 0 || seg.bbox.y0 < 0) {
            throw ValidationError("negative coordinate at segment " + std::to_string(i));
        }
        if (seg.bbox.x0 > seg.bbox.x1) {
            throw ValidationError("x0 > x1 at segment " + std::to_string(i));
        }
        if (seg.bbox.y0 > seg.bbox.y1) {
            throw ValidationError("y0 > y1 at segment " + std::to_string(i));
        }
        if (seg.bbox.width() == 0 || seg.bbox.height() == 0) ++degenerate;
        if (seg.bbox.x1 < seg.bbox.y0) ++suspicious_order;
        doc.segments.push_back(std::move(seg));
    }

    if (degenerate > 0) {
        log_warn(doc.image_id + ": " + std::to_string(degenerate) +
                 " zero-area bbox(es); treating as 1px in layout math");
    }
    if (opts.strict_bbox_order &&
        static_cast<double>(suspicious_order) > 0.9 * static_cast<double>(doc.segments.size())) {
        throw ValidationError(doc.image_id +
                              ": bbox coordinates look like [x0, y0, x1, y1] order "
                              "(x1 < y0 for >90% of segments); refusing in strict mode");
    }
    return doc;
}

std::string serialize_ocr_json(const OcrDocument& doc) {
    json root;
    root["image_id"] = doc.image_id;
    root["image_type"] = to_string(doc.image_type);
    if (doc.page_width) root["page_width"] = *doc.page_width;
    if (doc.page_height) root["page_height"] = *doc.page_height;
    root["segments"] = json::array();
    for (const auto& seg : doc.segments) {
        root["segments"].push_back(
            {{"text", seg.text}, {"bbox", {seg.bbox.x0, seg.bbox.x1, seg.bbox.y0, seg.bbox.y1}}});
    }
    return root.dump();
}

std::vector<std::size_t> reading_order_permutation(const std::vector<TextSegment>& segments,
                                                   ReadingOrder order) {
    std::vector<std::size_t> idx(segments.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto row_major_less = [&](std::size_t a, std::size_t b) {
        const BBox& ba = segments[a].bbox;
        const BBox& bb = segments[b].bbox;
        if (ba.y0 != bb.y0) return ba.y0 < bb.y0;
        return ba.x0 < bb.x0;
    };
    auto column_major_less = [&](std::size_t a, std::size_t b) {
        const BBox& ba = segments[a].bbox;
        const BBox& bb = segments[b].bbox;
        if (ba.x0 != bb.x0) return ba.x0 < bb.x0;
        return ba.y0 < bb.y0;
    };
    if (order == ReadingOrder::row_major) {
        std::stable_sort(idx.begin(), idx.end(), row_major_less);
    } else {
        std::stable_sort(idx.begin(), idx.end(), column_major_less);
    }
    return idx;
}

std::vector<TextSegment> sort_reading_order(std::vector<TextSegment> segments,
                                            ReadingOrder order) {
    const auto perm = reading_order_permutation(segments, order);
    std::vector<TextSegment> out;
    out.reserve(segments.size());
    for (std::size_t i : perm) out.push_back(std::move(segments[i]));
    return out;
}

}  // namespace reportqa
