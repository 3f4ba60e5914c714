#include "reportqa/synth.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "reportqa/error.hpp"
#include "reportqa/rng.hpp"
#include "reportqa/textutil.hpp"

namespace reportqa {

using nlohmann::json;

void SynthSpec::validate() const {
    if (rows < 1 || columns < 1) throw ValidationError("rows and columns must be >= 1");
    if (cell_len_min < 1 || cell_len_max < cell_len_min) {
        throw ValidationError("cell length range invalid");
    }
    if (line_height <= 0 || column_gap < 0 || char_width <= 0) {
        throw ValidationError("line_height/char_width must be > 0 and column_gap >= 0");
    }
    if (noise.y_jitter_fraction < 0 || noise.y_jitter_fraction > 1 ||
        noise.split_probability < 0 || noise.split_probability > 1 || noise.x_jitter < 0) {
        throw ValidationError("noise fractions must be in [0, 1] and x_jitter >= 0");
    }
    if (join_l <= 0 || join_l > 1) throw ValidationError("join_l must be in (0, 1]");
}

SynthSpec synth_spec_from_json(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed synth spec JSON at byte " + std::to_string(e.byte) + ": " +
                         e.what(), e.byte);
    }
    SynthSpec spec;
    spec.rows = root.value("rows", spec.rows);
    spec.columns = root.value("columns", spec.columns);
    spec.cell_len_min = root.value("cell_len_min", spec.cell_len_min);
    spec.cell_len_max = root.value("cell_len_max", spec.cell_len_max);
    spec.line_height = root.value("line_height", spec.line_height);
    spec.column_gap = root.value("column_gap", spec.column_gap);
    spec.char_width = root.value("char_width", spec.char_width);
    if (root.contains("noise")) {
        const auto& n = root["noise"];
        spec.noise.y_jitter_fraction = n.value("y_jitter_fraction", 0.0);
        spec.noise.x_jitter = n.value("x_jitter", 0.0);
        spec.noise.split_probability = n.value("split_probability", 0.0);
    }
    spec.seed = root.value("seed", spec.seed);
    spec.join_l = root.value("join_l", spec.join_l);
    spec.validate();
    return spec;
}

std::string synth_spec_to_json(const SynthSpec& spec) {
    json root;
    root["rows"] = spec.rows;
    root["columns"] = spec.columns;
    root["cell_len_min"] = spec.cell_len_min;
    root["cell_len_max"] = spec.cell_len_max;
    root["line_height"] = spec.line_height;
    root["column_gap"] = spec.column_gap;
    root["char_width"] = spec.char_width;
    root["noise"] = {{"y_jitter_fraction", spec.noise.y_jitter_fraction},
                     {"x_jitter", spec.noise.x_jitter},
                     {"split_probability", spec.noise.split_probability}};
    root["seed"] = spec.seed;
    root["join_l"] = spec.join_l;
    return root.dump();
}

std::string ground_truth_to_json(const GroundTruth& truth) {
    json root;
    root["char_width"] = truth.char_width;
    root["join_l"] = truth.join_l;
    root["canonical_text"] = truth.canonical_text;
    root["segments"] = json::array();
    for (const auto& s : truth.segments) {
        root["segments"].push_back({{"line", s.line}, {"col", s.column}});
    }
    return root.dump();
}

GroundTruth ground_truth_from_json(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed ground truth JSON at byte " + std::to_string(e.byte) + ": " +
                         e.what(), e.byte);
    }
    GroundTruth truth;
    truth.char_width = root.at("char_width").get<double>();
    truth.join_l = root.at("join_l").get<double>();
    truth.canonical_text = root.at("canonical_text").get<std::string>();
    for (const auto& s : root.at("segments")) {
        truth.segments.push_back({s.at("line").get<int>(), s.at("col").get<int>()});
    }
    return truth;
}

namespace {

// Lab-report-flavoured alphabet mixing Latin, digits and CJK so the
// character-width estimate sees realistic content. Every glyph occupies
// one monospace cell in this rendering model.
const std::u32string& synth_alphabet() {
    static const std::u32string alphabet =
        U"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789."
        U"血红蛋白白细胞红细胞计数尿素氮肌酐总蛋白球蛋白结论诊断参考范围阴性阳性";
    return alphabet;
}

std::string random_cell_text(int len, Rng& rng) {
    const auto& alphabet = synth_alphabet();
    std::u32string cps;
    cps.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
        cps.push_back(alphabet[rng.next_below(alphabet.size())]);
    }
    return encode_utf8(cps);
}

}  // namespace

SynthDocument generate(const SynthSpec& spec, const std::string& image_id) {
    spec.validate();
    Rng rng(spec.seed);

    const double box_height = std::floor(0.6 * spec.line_height);
    const int gap_spaces = spaces_for_gap(spec.column_gap, spec.char_width, spec.join_l);

    struct Cell {
        std::string text;
        int line;
        int column;     // canonical character column
        double x0, x1, y0, y1;
    };
    std::vector<Cell> cells;
    std::string canonical;

    for (int r = 0; r < spec.rows; ++r) {
        if (r > 0) canonical += '\n';
        int column = 0;
        double x = 0;
        for (int c = 0; c < spec.columns; ++c) {
            const int len = spec.cell_len_min +
                            static_cast<int>(rng.next_below(
                                static_cast<std::uint64_t>(spec.cell_len_max - spec.cell_len_min) +
                                1));
            if (c > 0) {
                canonical.append(static_cast<std::size_t>(gap_spaces), ' ');
                column += gap_spaces;
            }
            Cell cell;
            cell.text = random_cell_text(len, rng);
            cell.line = r;
            cell.column = column;
            cell.x0 = x;
            cell.x1 = x + len * spec.char_width;
            cell.y0 = r * spec.line_height;
            cell.y1 = cell.y0 + box_height;
            canonical += cell.text;
            column += len;
            x = cell.x1 + spec.column_gap;
            cells.push_back(std::move(cell));
        }
    }

    // Ground truth is fixed; now derive segments and apply noise.
    struct Seg {
        std::string text;
        TruthPlacement truth;
        double x0, x1, y0, y1;
    };
    std::vector<Seg> segs;
    for (const auto& cell : cells) {
        const int len = static_cast<int>(codepoint_count(cell.text));
        if (len >= 2 && rng.bernoulli(spec.noise.split_probability)) {
            const int split = 1 + static_cast<int>(rng.next_below(
                                      static_cast<std::uint64_t>(len - 1)));
            const std::u32string cps = decode_utf8(cell.text);
            const double mid_x = cell.x0 + split * spec.char_width;
            segs.push_back({encode_utf8(cps.substr(0, static_cast<std::size_t>(split))),
                            {cell.line, cell.column},
                            cell.x0, mid_x, cell.y0, cell.y1});
            segs.push_back({encode_utf8(cps.substr(static_cast<std::size_t>(split))),
                            {cell.line, cell.column + split},
                            mid_x, cell.x1, cell.y0, cell.y1});
        } else {
            segs.push_back({cell.text, {cell.line, cell.column}, cell.x0, cell.x1,
                            cell.y0, cell.y1});
        }
    }

    for (auto& seg : segs) {
        if (spec.noise.y_jitter_fraction > 0) {
            double dy = rng.uniform(-spec.noise.y_jitter_fraction, spec.noise.y_jitter_fraction) *
                        spec.line_height;
            dy = std::max(dy, -seg.y0);  // keep coordinates non-negative
            seg.y0 += dy;
            seg.y1 += dy;
        }
        if (spec.noise.x_jitter > 0) {
            double dx = rng.uniform(-spec.noise.x_jitter, spec.noise.x_jitter);
            dx = std::max(dx, -seg.x0);
            seg.x0 += dx;
            seg.x1 += dx;
        }
    }

    std::vector<std::size_t> order(segs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    SynthDocument out;
    out.doc.image_id = image_id;
    out.doc.image_type = ImageType::scanned_pdf;
    out.truth.char_width = spec.char_width;
    out.truth.join_l = spec.join_l;
    out.truth.canonical_text = canonical;
    for (std::size_t i : order) {
        TextSegment seg;
        seg.text = segs[i].text;
        seg.bbox = {segs[i].x0, segs[i].x1, segs[i].y0, segs[i].y1};
        out.doc.segments.push_back(std::move(seg));
        out.truth.segments.push_back(segs[i].truth);
    }
    return out;
}

Fidelity measure_fidelity(const RestoredText& restored, const GroundTruth& truth) {
    if (restored.line_map.size() != truth.segments.size()) {
        throw ValidationError("restored document and ground truth disagree on segment count");
    }
    Fidelity f;
    if (truth.segments.empty()) return f;
    std::size_t correct = 0;
    double column_error = 0;
    for (std::size_t i = 0; i < truth.segments.size(); ++i) {
        if (restored.line_map[i].line == truth.segments[i].line) ++correct;
        column_error += std::abs(restored.line_map[i].column - truth.segments[i].column);
    }
    f.line_accuracy = static_cast<double>(correct) / static_cast<double>(truth.segments.size());
    f.column_alignment_error = column_error / static_cast<double>(truth.segments.size());
    return f;
}

}  // namespace reportqa
