#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reportqa/annotation.hpp"
#include "reportqa/error.hpp"
#include "reportqa/metrics.hpp"
#include "reportqa/ocr.hpp"
#include "reportqa/qa_gen.hpp"
#include "reportqa/quality.hpp"
#include "reportqa/restore.hpp"
#include "reportqa/scoring.hpp"
#include "reportqa/synth.hpp"

namespace py = pybind11;
using namespace reportqa;

namespace {

RestoreParams make_params(double r, double l, int k, std::uint64_t seed,
                          const std::string& reading_order) {
    RestoreParams params;
    params.line_tolerance = r;
    params.space_expansion = l;
    params.height_clusters = k;
    params.seed = seed;
    if (reading_order == "x-then-y") {
        params.reading_order = ReadingOrder::column_major;
    } else if (reading_order != "y-then-x") {
        throw Error("unknown reading order \"" + reading_order + "\"");
    }
    return params;
}

SynonymSchema schema_or_builtin(const std::optional<std::string>& schema_json) {
    if (!schema_json) return SynonymSchema::builtin();
    return SynonymSchema::from_json(*schema_json);
}

CornerSet corners_from(const std::vector<std::pair<double, double>>& pts) {
    CornerSet corners;
    for (const auto& [x, y] : pts) corners.corners.push_back({x, y});
    return corners;
}

SkewAxis axis_from(const std::string& axis) {
    if (axis == "top_bottom") return SkewAxis::top_bottom;
    if (axis == "left_right") return SkewAxis::left_right;
    throw Error("unknown skew axis \"" + axis + "\"");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Medical-report document QA toolkit: layout restoration, QA generation, scoring";

    py::register_exception<Error>(m, "ToolkitError");

    m.def(
        "restore_document",
        [](const std::string& ocr_json, double r, double l, int k, std::uint64_t seed,
           const std::string& reading_order) {
            const OcrDocument doc = parse_ocr_json(ocr_json);
            const RestoredText restored = restore(doc, make_params(r, l, k, seed, reading_order));
            py::dict out;
            out["text"] = restored.text;
            out["char_width"] = restored.char_width;
            py::list line_map;
            for (const auto& p : restored.line_map) {
                line_map.append(py::make_tuple(p.line, p.column));
            }
            out["line_map"] = line_map;
            return out;
        },
        py::arg("ocr_json"), py::arg("r") = 0.15, py::arg("l") = 0.7, py::arg("k") = 3,
        py::arg("seed") = 0, py::arg("reading_order") = "y-then-x",
        "Restore layout-faithful text from an OCR JSON document");

    m.def("soft_accuracy", &soft_accuracy, py::arg("prediction"), py::arg("gold"),
          "1 when the normalized prediction contains the normalized gold answer");
    m.def("rouge_l", &rouge_l, py::arg("prediction"), py::arg("gold"),
          "LCS-based F1 between prediction and gold");

    m.def(
        "recompute_flag",
        [](const std::string& result, const std::string& range) {
            return to_string(recompute_flag(result, range));
        },
        py::arg("result"), py::arg("range"),
        "Abnormality flag (Normal/High/Low/Undetermined) for a result against a printed range");

    m.def(
        "canonicalize",
        [](const std::string& key, const std::optional<std::string>& schema_json) {
            const auto canon = canonicalize(key, schema_or_builtin(schema_json));
            return py::make_tuple(canon.key, canon.mapped);
        },
        py::arg("key"), py::arg("schema_json") = py::none(),
        "(canonical_key, mapped) after synonym-schema lookup");

    m.def(
        "validate_annotation_json",
        [](const std::string& annotation_json, const std::optional<std::string>& schema_json) {
            const auto issues = validate_annotation(parse_annotation_json(annotation_json),
                                                    schema_or_builtin(schema_json));
            py::list out;
            for (const auto& issue : issues) {
                py::dict d;
                d["image_id"] = issue.image_id;
                d["severity"] = to_string(issue.severity);
                d["code"] = to_string(issue.code);
                d["detail"] = issue.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("annotation_json"), py::arg("schema_json") = py::none(),
        "Quality-check one annotation; returns a list of issues");

    m.def(
        "classify_quality",
        [](const std::vector<std::pair<double, double>>& corners, const std::string& axis) {
            return to_string(classify_quality(corners_from(corners), axis_from(axis)));
        },
        py::arg("corners"), py::arg("axis") = "top_bottom",
        "High/Low image quality from detected page corners");

    m.def(
        "edge_angle_degrees",
        [](const std::vector<std::pair<double, double>>& corners,
           const std::string& axis) -> std::optional<double> {
            return edge_angle_degrees(corners_from(corners), axis_from(axis));
        },
        py::arg("corners"), py::arg("axis") = "top_bottom");

    m.def(
        "generate_bank",
        [](const std::vector<std::string>& annotation_jsons, const std::string& facts_json,
           const std::optional<std::string>& schema_json, std::uint64_t seed,
           double unanswerable_fraction) {
            std::vector<ReportAnnotation> annotations;
            annotations.reserve(annotation_jsons.size());
            for (const auto& a : annotation_jsons) annotations.push_back(parse_annotation_json(a));
            GenConfig config;
            config.seed = seed;
            config.unanswerable_fraction = unanswerable_fraction;
            const BigramCosineSimilarity sim;
            return bank_to_jsonl(generate_bank(annotations, FactBase::from_json(facts_json),
                                               schema_or_builtin(schema_json), sim, config));
        },
        py::arg("annotation_jsons"), py::arg("facts_json") = "[]",
        py::arg("schema_json") = py::none(), py::arg("seed") = 0,
        py::arg("unanswerable_fraction") = 0.0,
        "Generate a QA bank (JSONL string) from annotation JSON strings");

    m.def(
        "score",
        [](const std::string& bank_jsonl, const std::string& preds_jsonl,
           const std::optional<std::string>& meta_json) {
            StrataMeta meta;
            if (meta_json) meta = strata_meta_from_json(*meta_json);
            return score_report_to_json(score_run(bank_from_jsonl(bank_jsonl),
                                                  predictions_from_jsonl(preds_jsonl), meta));
        },
        py::arg("bank_jsonl"), py::arg("preds_jsonl"), py::arg("meta_json") = py::none(),
        "Score predictions against a bank; returns the report as JSON");

    m.def(
        "synth_generate",
        [](const std::string& spec_json, const std::string& image_id) {
            const SynthDocument sd = generate(synth_spec_from_json(spec_json), image_id);
            return py::make_tuple(serialize_ocr_json(sd.doc), ground_truth_to_json(sd.truth));
        },
        py::arg("spec_json"), py::arg("image_id") = "synth-0",
        "(ocr_json, truth_json) for one synthetic document");

    m.def(
        "measure_fidelity",
        [](const std::string& ocr_json, const std::string& truth_json, double r, int k,
           std::uint64_t seed) {
            const GroundTruth truth = ground_truth_from_json(truth_json);
            RestoreParams params;
            params.line_tolerance = r;
            params.space_expansion = truth.join_l;
            params.height_clusters = k;
            params.seed = seed;
            const Fidelity f = measure_fidelity(restore(parse_ocr_json(ocr_json), params), truth);
            return py::make_tuple(f.line_accuracy, f.column_alignment_error);
        },
        py::arg("ocr_json"), py::arg("truth_json"), py::arg("r") = 0.15, py::arg("k") = 3,
        py::arg("seed") = 0,
        "(line_accuracy, column_alignment_error) of restoring a synthetic document");

    m.def("default_synonym_schema", [] { return SynonymSchema::builtin().to_json(); },
          "The built-in synonym schema as JSON");

    m.attr("ABSTAIN_TOKEN") = kAbstainToken;
}
