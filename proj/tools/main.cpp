#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reportqa/annotation.hpp"
#include "reportqa/baseline.hpp"
#include "reportqa/error.hpp"
#include "reportqa/log.hpp"
#include "reportqa/ocr.hpp"
#include "reportqa/parallel.hpp"
#include "reportqa/qa_gen.hpp"
#include "reportqa/quality.hpp"
#include "reportqa/restore.hpp"
#include "reportqa/scoring.hpp"
#include "reportqa/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reportqa;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<fs::path> list_inputs(const std::string& in, const std::string& suffix,
                                  const std::vector<std::string>& exclude_suffixes = {}) {
    const fs::path p(in);
    if (!fs::exists(p)) throw Error(in + " does not exist");
    std::vector<fs::path> files;
    if (fs::is_regular_file(p)) {
        files.push_back(p);
    } else {
        for (const auto& entry : fs::directory_iterator(p)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            if (!ends_with(name, suffix)) continue;
            bool excluded = false;
            for (const auto& ex : exclude_suffixes) {
                if (ends_with(name, ex)) excluded = true;
            }
            if (!excluded) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
    }
    if (files.empty()) throw Error("no " + suffix + " files under " + in);
    return files;
}

std::vector<ReportAnnotation> load_annotations(const std::string& dir) {
    std::vector<ReportAnnotation> annotations;
    for (const auto& path : list_inputs(dir, ".json")) {
        try {
            annotations.push_back(parse_annotation_json(read_file(path)));
        } catch (const Error& e) {
            throw Error(path.string() + ": " + e.what());
        }
    }
    return annotations;
}

SynonymSchema load_schema(const std::string& path) {
    if (path.empty()) return SynonymSchema::builtin();
    return SynonymSchema::from_json(read_file(path));
}

std::string require(const std::string& value, const std::string& flag) {
    if (value.empty()) throw Error("missing required option " + flag);
    return value;
}

struct GlobalOptions {
    std::size_t jobs = std::thread::hardware_concurrency();
    std::string log_level = "warn";
    bool print_config = false;
};

// ---------------------------------------------------------------------------

struct RestoreCmd {
    std::string in, out;
    RestoreParams params;
    bool emit_line_map = false;
    bool strict_order = false;
    std::string reading_order = "y-then-x";

    int run(const GlobalOptions& global) const {
        RestoreParams p = params;
        if (reading_order == "y-then-x") {
            p.reading_order = ReadingOrder::row_major;
        } else if (reading_order == "x-then-y") {
            p.reading_order = ReadingOrder::column_major;
        } else {
            throw Error("unknown reading order \"" + reading_order + "\"");
        }
        p.validate();

        const auto files =
            list_inputs(require(in, "--in"), ".json", {".truth.json", ".linemap.json"});
        fs::create_directories(require(out, "--out"));

        std::mutex mutex;
        std::set<std::string> seen;
        parallel_for(global.jobs, files.size(), [&](std::size_t i) {
            ParseOptions opts;
            opts.strict_bbox_order = strict_order;
            OcrDocument doc;
            try {
                doc = parse_ocr_json(read_file(files[i]), opts);
            } catch (const Error& e) {
                throw Error(files[i].string() + ": " + e.what());
            }
            {
                std::lock_guard<std::mutex> lock(mutex);
                if (!seen.insert(doc.image_id).second) {
                    throw Error("duplicate image_id \"" + doc.image_id + "\"");
                }
            }
            const RestoredText restored = restore(doc, p);
            write_file(fs::path(out) / (doc.image_id + ".txt"), restored.text + "\n");
            if (emit_line_map) {
                json j;
                j["char_width"] = restored.char_width;
                j["segments"] = json::array();
                for (const auto& s : restored.line_map) {
                    j["segments"].push_back({{"line", s.line}, {"col", s.column}});
                }
                write_file(fs::path(out) / (doc.image_id + ".linemap.json"), j.dump());
            }
        });
        log_info("restored " + std::to_string(files.size()) + " document(s) into " + out);
        return 0;
    }
};

struct ValidateCmd {
    std::string annotations, schema, report;
    bool strict = false;

    int run(const GlobalOptions& global) const {
        const auto anns = load_annotations(require(annotations, "--annotations"));
        const SynonymSchema syn = load_schema(schema);

        std::vector<std::vector<Issue>> per_ann(anns.size());
        parallel_for(global.jobs, anns.size(),
                     [&](std::size_t i) { per_ann[i] = validate_annotation(anns[i], syn); });

        std::vector<Issue> issues;
        for (auto& list : per_ann) {
            for (auto& issue : list) issues.push_back(std::move(issue));
        }
        if (!report.empty()) write_file(report, serialize_issues_json(issues));
        std::cout << issues.size() << " issue(s) across " << anns.size() << " annotation(s)\n";
        return (strict && !issues.empty()) ? 1 : 0;
    }
};

struct GenQaCmd {
    std::string annotations, facts, schema, out, custom_template;
    GenConfig config;

    int run(const GlobalOptions& global) const {
        const auto anns = load_annotations(require(annotations, "--annotations"));
        const FactBase fact_base =
            facts.empty() ? FactBase::from_facts({}) : FactBase::from_json(read_file(facts));
        const SynonymSchema syn = load_schema(schema);

        GenConfig cfg = config;
        cfg.jobs = global.jobs;
        if (!custom_template.empty()) {
            const json t = json::parse(read_file(custom_template));
            QaTemplate tmpl;
            tmpl.task = QaTask::Custom;
            tmpl.subtask = qa_subtask_from_string(t.value("subtask", "Summarization"));
            tmpl.question_pattern = t.at("question_pattern").get<std::string>();
            tmpl.answer_pattern = t.at("answer_pattern").get<std::string>();
            cfg.custom_template = tmpl;
        }

        const BigramCosineSimilarity sim;
        const auto bank = generate_bank(anns, fact_base, syn, sim, cfg);
        write_file(require(out, "--out"), bank_to_jsonl(bank));
        std::cout << bank.size() << " QA item(s) written to " << out << "\n";
        return 0;
    }
};

struct ScoreCmd {
    std::string bank, preds, out, annotations, meta;

    int run(const GlobalOptions&) const {
        const auto items = bank_from_jsonl(read_file(require(bank, "--bank")));
        const auto predictions = predictions_from_jsonl(read_file(require(preds, "--preds")));
        StrataMeta strata;
        if (!annotations.empty()) {
            strata = strata_meta_from_annotations(load_annotations(annotations));
        } else if (!meta.empty()) {
            strata = strata_meta_from_json(read_file(meta));
        }
        const ScoreReport report = score_run(items, predictions, strata);
        if (!out.empty()) write_file(out, score_report_to_json(report));
        std::cout << render_score_table(report);
        return 0;
    }
};

struct RunBaselineCmd {
    std::string bank, docs, endpoint, out;
    bool dry_run = false;

    int run(const GlobalOptions&) const {
        const auto items = bank_from_jsonl(read_file(require(bank, "--bank")));
        const EndpointConfig cfg =
            endpoint_config_from_json(read_file(require(endpoint, "--endpoint")));

        std::map<std::string, std::string> docs_by_image;
        for (const auto& path : list_inputs(require(docs, "--docs"), ".txt")) {
            docs_by_image[path.stem().string()] = read_file(path);
        }

        const RunSummary summary =
            dry_run ? run_batch_dry(items, docs_by_image, FactBase::from_facts(load_facts()),
                                    cfg, require(out, "--out"))
                    : run_batch(items, docs_by_image, FactBase::from_facts(load_facts()), cfg,
                                require(out, "--out"));
        std::cout << summary.completed << " completed, " << summary.failed << " failed, "
                  << summary.skipped << " skipped (already present)\n";
        return 0;
    }

    std::string facts_path;
    std::vector<ContextFact> load_facts() const {
        if (facts_path.empty()) return {};
        return FactBase::from_json(read_file(facts_path)).facts();
    }
};

struct SynthCmd {
    std::string spec_path, out;
    int n = 1;

    int run(const GlobalOptions& global) const {
        const SynthSpec base = synth_spec_from_json(read_file(require(spec_path, "--spec")));
        if (n < 1) throw Error("--n must be >= 1");
        fs::create_directories(require(out, "--out"));

        parallel_for(global.jobs, static_cast<std::size_t>(n), [&](std::size_t i) {
            SynthSpec spec = base;
            spec.seed = Rng(base.seed).fork("doc-" + std::to_string(i)).next_u64();
            char name[32];
            std::snprintf(name, sizeof(name), "synth-%04zu", i);
            const SynthDocument sd = generate(spec, name);
            write_file(fs::path(out) / (std::string(name) + ".ocr.json"),
                       serialize_ocr_json(sd.doc));
            write_file(fs::path(out) / (std::string(name) + ".truth.json"),
                       ground_truth_to_json(sd.truth));
        });
        std::cout << n << " synthetic document(s) written to " << out << "\n";
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Medical-report document QA toolkit: OCR layout restoration, annotation "
                 "validation, QA bank generation, baseline running and scoring"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    app.set_config("--config", "", "TOML-style config file; flags override file values");

    GlobalOptions global;
    app.add_option("--jobs", global.jobs, "Worker threads for per-document work")
        ->capture_default_str();
    app.add_option("--log-level", global.log_level, "debug|info|warn|error|off")
        ->capture_default_str();
    app.add_flag("--print-config", global.print_config,
                 "Print the fully resolved configuration and exit");

    RestoreCmd restore_cmd;
    auto* restore_sub = app.add_subcommand("restore", "Restore layout-faithful text from OCR JSON");
    restore_sub->add_option("--in", restore_cmd.in, "Input OCR JSON file or directory");
    restore_sub->add_option("--out", restore_cmd.out, "Output directory for .txt files");
    restore_sub->add_option("--r", restore_cmd.params.line_tolerance, "Line tolerance coefficient")
        ->capture_default_str();
    restore_sub->add_option("--l", restore_cmd.params.space_expansion, "Space expansion coefficient")
        ->capture_default_str();
    restore_sub->add_option("--k", restore_cmd.params.height_clusters, "Height cluster count")
        ->capture_default_str();
    restore_sub->add_option("--seed", restore_cmd.params.seed, "Clustering seed")
        ->capture_default_str();
    restore_sub->add_flag("--emit-line-map", restore_cmd.emit_line_map,
                          "Also write .linemap.json per document");
    restore_sub->add_flag("--strict-order", restore_cmd.strict_order,
                          "Reject files whose bbox order looks like [x0, y0, x1, y1]");
    restore_sub
        ->add_option("--reading-order", restore_cmd.reading_order, "y-then-x (default) or x-then-y")
        ->capture_default_str();

    ValidateCmd validate_cmd;
    auto* validate_sub = app.add_subcommand("validate", "Quality-check annotation files");
    validate_sub->add_option("--annotations", validate_cmd.annotations, "Annotation directory");
    validate_sub->add_option("--schema", validate_cmd.schema, "Synonym schema JSON (default: built-in)");
    validate_sub->add_option("--report", validate_cmd.report, "Write issues JSON here");
    validate_sub->add_flag("--strict", validate_cmd.strict, "Exit 1 when any issue is found");

    GenQaCmd gen_cmd;
    auto* gen_sub = app.add_subcommand("gen-qa", "Generate a QA bank from annotations");
    gen_sub->add_option("--annotations", gen_cmd.annotations, "Annotation directory");
    gen_sub->add_option("--facts", gen_cmd.facts, "Context fact base JSON");
    gen_sub->add_option("--schema", gen_cmd.schema, "Synonym schema JSON (default: built-in)");
    gen_sub->add_option("--seed", gen_cmd.config.seed, "Generation seed")->capture_default_str();
    gen_sub
        ->add_option("--unanswerable-fraction", gen_cmd.config.unanswerable_fraction,
                     "Fraction of Entity/Table items rewritten to be unanswerable")
        ->capture_default_str();
    gen_sub->add_option("--multirow-pair-limit", gen_cmd.config.multirow_pair_limit,
                        "Max multi-row pairs per report (0 = min(C(n,2), 2n))");
    gen_sub->add_option("--custom-template", gen_cmd.custom_template,
                        "JSON template for an extra customized item per report");
    gen_sub->add_option("--out", gen_cmd.out, "Output bank JSONL");

    ScoreCmd score_cmd;
    auto* score_sub = app.add_subcommand("score", "Score a predictions file against a bank");
    score_sub->add_option("--bank", score_cmd.bank, "Bank JSONL");
    score_sub->add_option("--preds", score_cmd.preds, "Predictions JSONL");
    score_sub->add_option("--out", score_cmd.out, "Write report JSON here");
    score_sub->add_option("--annotations", score_cmd.annotations,
                          "Annotation directory for strata metadata");
    score_sub->add_option("--meta", score_cmd.meta, "Strata metadata JSON");

    RunBaselineCmd run_cmd;
    auto* run_sub = app.add_subcommand("run-baseline",
                                       "Submit restored-text prompts to a model endpoint");
    run_sub->add_option("--bank", run_cmd.bank, "Bank JSONL");
    run_sub->add_option("--docs", run_cmd.docs, "Directory of restored .txt documents");
    run_sub->add_option("--endpoint", run_cmd.endpoint, "Endpoint config JSON");
    run_sub->add_option("--facts", run_cmd.facts_path, "Context fact base JSON");
    run_sub->add_option("--out", run_cmd.out, "Predictions JSONL (appended; resumable)");
    run_sub->add_flag("--dry-run", run_cmd.dry_run, "Write prompt records instead of calling");

    SynthCmd synth_cmd;
    auto* synth_sub = app.add_subcommand("synth", "Generate synthetic OCR documents with ground truth");
    synth_sub->add_option("--spec", synth_cmd.spec_path, "Synth spec JSON");
    synth_sub->add_option("--n", synth_cmd.n, "Number of documents")->capture_default_str();
    synth_sub->add_option("--out", synth_cmd.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        set_log_level(log_level_from_string(global.log_level));
        if (global.jobs == 0) global.jobs = 1;

        if (global.print_config) {
            std::cout << app.config_to_str(true, false);
            return 0;
        }
        if (restore_sub->parsed()) return restore_cmd.run(global);
        if (validate_sub->parsed()) return validate_cmd.run(global);
        if (gen_sub->parsed()) return gen_cmd.run(global);
        if (score_sub->parsed()) return score_cmd.run(global);
        if (run_sub->parsed()) return run_cmd.run(global);
        if (synth_sub->parsed()) return synth_cmd.run(global);
        std::cout << app.help();
        return 2;
    } catch (const Error& e) {
        log_error(e.what());
        return 3;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 3;
    }
}
