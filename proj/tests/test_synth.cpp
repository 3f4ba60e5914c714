#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reportqa/error.hpp"
#include "reportqa/restore.hpp"
#include "reportqa/rng.hpp"
#include "reportqa/synth.hpp"

using namespace reportqa;

namespace {

RestoreParams params_for(const GroundTruth& truth) {
    RestoreParams params;
    params.space_expansion = truth.join_l;
    return params;
}

}  // namespace

TEST_CASE("generation is deterministic for a fixed seed") {
    SynthSpec spec;
    spec.rows = 7;
    spec.columns = 3;
    spec.noise.y_jitter_fraction = 0.15;
    spec.noise.split_probability = 0.2;
    spec.seed = 31337;
    const auto a = generate(spec, "d");
    const auto b = generate(spec, "d");
    CHECK(serialize_ocr_json(a.doc) == serialize_ocr_json(b.doc));
    CHECK(ground_truth_to_json(a.truth) == ground_truth_to_json(b.truth));

    spec.seed = 31338;
    const auto c = generate(spec, "d");
    CHECK(serialize_ocr_json(a.doc) != serialize_ocr_json(c.doc));
}

TEST_CASE("noiseless documents restore exactly") {
    Rng rng(51);
    for (int trial = 0; trial < 60; ++trial) {
        SynthSpec spec;
        spec.rows = 1 + static_cast<int>(rng.next_below(8));
        spec.columns = 1 + static_cast<int>(rng.next_below(4));
        spec.cell_len_min = 1 + static_cast<int>(rng.next_below(3));
        spec.cell_len_max = spec.cell_len_min + static_cast<int>(rng.next_below(6));
        spec.column_gap = static_cast<double>(10 + rng.next_below(60));
        spec.char_width = static_cast<double>(6 + rng.next_below(10));
        spec.seed = rng.next_u64();
        const auto sd = generate(spec);
        const auto restored = restore(sd.doc, params_for(sd.truth));
        const auto fidelity = measure_fidelity(restored, sd.truth);
        CHECK(fidelity.line_accuracy == 1.0);
        CHECK(fidelity.column_alignment_error == 0.0);
        CHECK(restored.text == sd.truth.canonical_text);
        CHECK(restored.char_width == spec.char_width);
    }
}

TEST_CASE("a single-line collapse scores 1/rows on a one-column grid") {
    SynthSpec spec;
    spec.rows = 5;
    spec.columns = 1;
    spec.seed = 4;
    const auto sd = generate(spec);
    RestoredText collapsed;
    collapsed.char_width = spec.char_width;
    collapsed.line_map.resize(sd.truth.segments.size());
    for (std::size_t i = 0; i < sd.truth.segments.size(); ++i) {
        collapsed.line_map[i] = {0, sd.truth.segments[i].column};
    }
    const auto fidelity = measure_fidelity(collapsed, sd.truth);
    CHECK(fidelity.line_accuracy == doctest::Approx(1.0 / 5.0));
    CHECK(fidelity.column_alignment_error == 0.0);
}

TEST_CASE("fidelity equals an independent recount") {
    Rng rng(52);
    for (int trial = 0; trial < 40; ++trial) {
        SynthSpec spec;
        spec.rows = 2 + static_cast<int>(rng.next_below(6));
        spec.columns = 1 + static_cast<int>(rng.next_below(4));
        spec.noise.y_jitter_fraction = rng.uniform(0, 0.35);
        spec.noise.x_jitter = rng.uniform(0, 8);
        spec.noise.split_probability = rng.uniform(0, 0.4);
        spec.seed = rng.next_u64();
        const auto sd = generate(spec);
        const auto restored = restore(sd.doc, params_for(sd.truth));
        const auto fidelity = measure_fidelity(restored, sd.truth);

        std::size_t hits = 0;
        double err = 0;
        for (std::size_t i = 0; i < sd.truth.segments.size(); ++i) {
            if (restored.line_map[i].line == sd.truth.segments[i].line) ++hits;
            err += std::abs(restored.line_map[i].column - sd.truth.segments[i].column);
        }
        const double n = static_cast<double>(sd.truth.segments.size());
        CHECK(fidelity.line_accuracy == hits / n);
        CHECK(fidelity.column_alignment_error == err / n);
    }
}

TEST_CASE("splits stay on the true line even when split probability is 1") {
    SynthSpec spec;
    spec.rows = 4;
    spec.columns = 2;
    spec.cell_len_min = 2;
    spec.noise.split_probability = 1.0;
    spec.seed = 6;
    const auto sd = generate(spec);
    CHECK(sd.doc.segments.size() == 16);  // every cell split in two
    const auto restored = restore(sd.doc, params_for(sd.truth));
    const auto fidelity = measure_fidelity(restored, sd.truth);
    CHECK(fidelity.line_accuracy == 1.0);
}

TEST_CASE("line accuracy degrades monotonically with vertical jitter") {
    const std::vector<double> jitters = {0.0, 0.1, 0.2, 0.3};
    std::vector<double> means;
    for (double jitter : jitters) {
        double total = 0;
        Rng rng(53);
        const int docs = 60;
        for (int d = 0; d < docs; ++d) {
            SynthSpec spec;
            spec.rows = 3 + static_cast<int>(rng.next_below(10));
            spec.columns = 1 + static_cast<int>(rng.next_below(4));
            spec.noise.y_jitter_fraction = jitter;
            spec.seed = rng.next_u64();
            const auto sd = generate(spec);
            const auto restored = restore(sd.doc, params_for(sd.truth));
            total += measure_fidelity(restored, sd.truth).line_accuracy;
        }
        means.push_back(total / docs);
    }
    CHECK(means[0] == 1.0);
    for (std::size_t i = 1; i < means.size(); ++i) CHECK(means[i] <= means[i - 1] + 1e-12);
}

TEST_CASE("spec JSON round trip and validation") {
    SynthSpec spec;
    spec.rows = 9;
    spec.noise.y_jitter_fraction = 0.25;
    spec.seed = 12;
    const SynthSpec back = synth_spec_from_json(synth_spec_to_json(spec));
    CHECK(back.rows == 9);
    CHECK(back.noise.y_jitter_fraction == 0.25);
    CHECK(back.seed == 12);

    CHECK_THROWS_AS(synth_spec_from_json(R"({"rows":0})"), ValidationError);
    CHECK_THROWS_AS(synth_spec_from_json(R"({"noise":{"split_probability":2}})"),
                    ValidationError);
}

TEST_CASE("truth JSON round trip") {
    SynthSpec spec;
    spec.rows = 3;
    spec.seed = 8;
    const auto sd = generate(spec);
    const GroundTruth back = ground_truth_from_json(ground_truth_to_json(sd.truth));
    CHECK(back.canonical_text == sd.truth.canonical_text);
    CHECK(back.segments.size() == sd.truth.segments.size());
    CHECK(back.char_width == sd.truth.char_width);
}

TEST_CASE("segment count mismatches are rejected") {
    SynthSpec spec;
    spec.rows = 2;
    spec.seed = 9;
    const auto sd = generate(spec);
    RestoredText wrong;
    wrong.line_map.resize(sd.truth.segments.size() + 1);
    CHECK_THROWS_AS(measure_fidelity(wrong, sd.truth), ValidationError);
}
