#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "reportqa/ocr.hpp"
#include "reportqa/restore.hpp"

namespace reportqa {

struct SynthNoise {
    double y_jitter_fraction = 0;  // of line height, uniform +/-
    double x_jitter = 0;           // pixels, uniform +/-
    double split_probability = 0;  // chance a cell splits into two segments
};

// Monospace grid layout: every glyph is char_width pixels wide, so the
// average character width is exactly recoverable from a noiseless
// rendering and the canonical text is the exact restoration target.
struct SynthSpec {
    int rows = 5;
    int columns = 3;
    int cell_len_min = 2;
    int cell_len_max = 8;
    double line_height = 20;
    double column_gap = 30;
    double char_width = 10;
    SynthNoise noise;
    std::uint64_t seed = 0;
    // Space-expansion coefficient assumed when computing canonical column
    // starts; restoring with the same l reproduces them exactly.
    double join_l = 0.7;

    void validate() const;
};

SynthSpec synth_spec_from_json(std::string_view bytes);
std::string synth_spec_to_json(const SynthSpec& spec);

struct TruthPlacement {
    int line = 0;
    int column = 0;  // character column in the canonical row
};

struct GroundTruth {
    double char_width = 0;
    double join_l = 0.7;
    std::string canonical_text;
    std::vector<TruthPlacement> segments;  // aligned with OcrDocument.segments
};

std::string ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(std::string_view bytes);

struct SynthDocument {
    OcrDocument doc;
    GroundTruth truth;
};

// Ground truth is fixed before any noise is applied; splits keep both
// halves on the true line, jitter moves boxes afterwards, and the emitted
// segment order is shuffled so reading-order recovery is exercised.
SynthDocument generate(const SynthSpec& spec, const std::string& image_id = "synth-0");

struct Fidelity {
    double line_accuracy = 0;          // fraction of segments on their true line
    double column_alignment_error = 0; // mean |restored column - true column|
};

Fidelity measure_fidelity(const RestoredText& restored, const GroundTruth& truth);

}  // namespace reportqa
