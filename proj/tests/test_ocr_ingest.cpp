#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "reportqa/error.hpp"
#include "reportqa/ocr.hpp"
#include "reportqa/rng.hpp"

using namespace reportqa;

namespace {

OcrDocument random_doc(Rng& rng, std::size_t n_segments) {
    OcrDocument doc;
    doc.image_id = "doc-" + std::to_string(rng.next_below(1000));
    doc.image_type = ImageType::photo;
    for (std::size_t i = 0; i < n_segments; ++i) {
        TextSegment seg;
        seg.text = "t" + std::to_string(i);
        const double x0 = static_cast<double>(rng.next_below(500));
        const double y0 = static_cast<double>(rng.next_below(500));
        seg.bbox = {x0, x0 + 1 + static_cast<double>(rng.next_below(80)), y0,
                    y0 + 1 + static_cast<double>(rng.next_below(30))};
        doc.segments.push_back(std::move(seg));
    }
    return doc;
}

}  // namespace

TEST_CASE("parse maps the documented schema") {
    const std::string json =
        R"({"image_id":"a","image_type":"photo","segments":[{"text":"Hb","bbox":[10,40,100,120]}]})";
    const OcrDocument doc = parse_ocr_json(json);
    REQUIRE(doc.segments.size() == 1);
    CHECK(doc.segments[0].text == "Hb");
    CHECK(doc.segments[0].bbox.x0 == 10);
    CHECK(doc.segments[0].bbox.x1 == 40);
    CHECK(doc.segments[0].bbox.y0 == 100);
    CHECK(doc.segments[0].bbox.y1 == 120);
    CHECK(doc.image_type == ImageType::photo);
}

TEST_CASE("parse rejects inverted bbox naming the segment") {
    const std::string json =
        R"({"image_id":"a","image_type":"photo","segments":[{"text":"Hb","bbox":[40,10,100,120]}]})";
    CHECK_THROWS_WITH_AS(parse_ocr_json(json), doctest::Contains("x0 > x1 at segment 0"),
                         ValidationError);
}

TEST_CASE("parse rejects empty segment list") {
    const std::string json = R"({"image_id":"a","image_type":"photo","segments":[]})";
    CHECK_THROWS_WITH_AS(parse_ocr_json(json), doctest::Contains("no segments"), ValidationError);
}

TEST_CASE("malformed JSON reports a byte offset") {
    try {
        parse_ocr_json("{\"image_id\": \"a\", !!!");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.byte_offset() > 0);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("parse validates text, coordinates and image type") {
    CHECK_THROWS_AS(parse_ocr_json(
                        R"({"image_id":"a","image_type":"photo","segments":[{"text":"  ","bbox":[0,1,0,1]}]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_ocr_json(
                        R"({"image_id":"a","image_type":"photo","segments":[{"text":"x","bbox":[-1,1,0,1]}]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_ocr_json(
                        R"({"image_id":"a","image_type":"fax","segments":[{"text":"x","bbox":[0,1,0,1]}]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_ocr_json(R"({"image_type":"photo","segments":[]})"), ValidationError);
}

TEST_CASE("zero-area boxes are accepted and treated as 1px") {
    const std::string json =
        R"({"image_id":"a","image_type":"photo","segments":[{"text":"x","bbox":[10,10,5,5]}]})";
    const OcrDocument doc = parse_ocr_json(json);
    CHECK(doc.segments[0].bbox.width() == 0);
    CHECK(doc.segments[0].bbox.effective_width() == 1.0);
    CHECK(doc.segments[0].bbox.effective_height() == 1.0);
}

TEST_CASE("strict mode rejects files that look like [x0, y0, x1, y1]") {
    // x1 slot < y0 slot for every segment.
    std::string segs;
    for (int i = 0; i < 10; ++i) {
        if (i) segs += ",";
        segs += R"({"text":"t","bbox":[5,10,200,260]})";
    }
    const std::string json =
        R"({"image_id":"a","image_type":"photo","segments":[)" + segs + "]}";
    CHECK_NOTHROW(parse_ocr_json(json));
    ParseOptions strict;
    strict.strict_bbox_order = true;
    CHECK_THROWS_WITH_AS(parse_ocr_json(json, strict), doctest::Contains("strict"),
                         ValidationError);
}

TEST_CASE("reading order: left precedes right within a row") {
    std::vector<TextSegment> segs = {{"right", {50, 60, 10, 20}}, {"left", {5, 15, 10, 20}}};
    const auto sorted = sort_reading_order(segs);
    CHECK(sorted[0].text == "left");
    CHECK(sorted[1].text == "right");
}

TEST_CASE("reading order: upper row precedes lower row regardless of x") {
    std::vector<TextSegment> segs = {{"lower", {5, 15, 100, 110}}, {"upper", {500, 510, 10, 20}}};
    const auto sorted = sort_reading_order(segs);
    CHECK(sorted[0].text == "upper");
    CHECK(sorted[1].text == "lower");
}

TEST_CASE("reading order: sorted input is a fixed point") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto doc = random_doc(rng, 1 + rng.next_below(20));
        const auto once = sort_reading_order(doc.segments);
        const auto twice = sort_reading_order(once);
        CHECK(once == twice);
    }
}

TEST_CASE("reading order is a permutation of the input") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto doc = random_doc(rng, 1 + rng.next_below(20));
        auto sorted = sort_reading_order(doc.segments);
        auto a = doc.segments;
        auto cmp = [](const TextSegment& l, const TextSegment& r) {
            return std::tie(l.bbox.x0, l.bbox.y0, l.text) < std::tie(r.bbox.x0, r.bbox.y0, r.text);
        };
        std::sort(a.begin(), a.end(), cmp);
        std::sort(sorted.begin(), sorted.end(), cmp);
        CHECK(a == sorted);
    }
}

TEST_CASE("column-major order flag swaps the keys") {
    std::vector<TextSegment> segs = {{"b", {50, 60, 0, 10}}, {"a", {5, 15, 100, 110}}};
    const auto sorted = sort_reading_order(segs, ReadingOrder::column_major);
    CHECK(sorted[0].text == "a");
}

TEST_CASE("serialize then parse is the identity") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        auto doc = random_doc(rng, 1 + rng.next_below(12));
        if (trial % 3 == 0) {
            doc.page_width = 800;
            doc.page_height = 1100;
        }
        const OcrDocument back = parse_ocr_json(serialize_ocr_json(doc));
        CHECK(back.image_id == doc.image_id);
        CHECK(back.image_type == doc.image_type);
        CHECK(back.page_width == doc.page_width);
        CHECK(back.page_height == doc.page_height);
        CHECK(back.segments == doc.segments);
    }
}
