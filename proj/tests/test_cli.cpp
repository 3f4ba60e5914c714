#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "reportqa/annotation.hpp"
#include "reportqa/qa_gen.hpp"
#include "reportqa/scoring.hpp"
#include "support/fixtures.hpp"
#include "support/mock_endpoint.hpp"

using namespace reportqa;
using namespace reportqa::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("reportqa-cli-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    fs::path operator/(const std::string& name) const { return path / name; }
};

int run_cli(const std::string& args, const fs::path& capture) {
    const std::string cmd =
        std::string(REPORTQA_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace

TEST_CASE("synth then restore round trips through the filesystem") {
    TempDir dir;
    write(dir / "spec.json",
          R"({"rows": 5, "columns": 3, "line_height": 20, "column_gap": 30, "seed": 77})");

    CHECK(run_cli("synth --spec " + (dir / "spec.json").string() + " --n 4 --out " +
                      (dir / "docs").string(),
                  dir / "synth.log") == 0);
    CHECK(fs::exists(dir / "docs" / "synth-0000.ocr.json"));
    CHECK(fs::exists(dir / "docs" / "synth-0003.truth.json"));

    CHECK(run_cli("restore --in " + (dir / "docs").string() + " --out " +
                      (dir / "restored").string() + " --emit-line-map",
                  dir / "restore.log") == 0);
    CHECK(fs::exists(dir / "restored" / "synth-0000.txt"));
    CHECK(fs::exists(dir / "restored" / "synth-0000.linemap.json"));

    // Noiseless round trip: restored text equals the canonical text.
    const json truth = json::parse(slurp(dir / "docs" / "synth-0001.truth.json"));
    std::string restored = slurp(dir / "restored" / "synth-0001.txt");
    if (!restored.empty() && restored.back() == '\n') restored.pop_back();
    CHECK(restored == truth["canonical_text"].get<std::string>());
}

TEST_CASE("validate exits 1 under --strict when issues exist") {
    TempDir dir;
    fs::create_directories(dir / "ann");
    ReportAnnotation bad = consistent_lab_annotation("img-bad");
    bad.quadruplets[1].flag = AbnormalFlag::Normal;  // forces a flag mismatch
    write(dir / "ann" / "img-bad.json", serialize_annotation_json(bad));

    CHECK(run_cli("validate --annotations " + (dir / "ann").string() + " --report " +
                      (dir / "issues.json").string(),
                  dir / "v1.log") == 0);
    CHECK(run_cli("validate --strict --annotations " + (dir / "ann").string() + " --report " +
                      (dir / "issues2.json").string(),
                  dir / "v2.log") == 1);

    const json issues = json::parse(slurp(dir / "issues2.json"));
    REQUIRE(issues.is_array());
    bool found = false;
    for (const auto& issue : issues) {
        if (issue["code"] == "abnormal_flag_mismatch") found = true;
    }
    CHECK(found);

    ReportAnnotation good = consistent_lab_annotation("img-good");
    fs::create_directories(dir / "ok");
    write(dir / "ok" / "img-good.json", serialize_annotation_json(good));
    CHECK(run_cli("validate --strict --annotations " + (dir / "ok").string(), dir / "v3.log") ==
          0);
}

TEST_CASE("unknown subcommands exit 2") {
    TempDir dir;
    CHECK(run_cli("frobnicate", dir / "u.log") == 2);
}

TEST_CASE("missing required options exit 3 with a message") {
    TempDir dir;
    CHECK(run_cli("restore", dir / "m.log") == 3);
    CHECK(slurp(dir / "m.log").find("--in") != std::string::npos);
}

TEST_CASE("print-config reports the shipped defaults") {
    TempDir dir;
    CHECK(run_cli("restore --print-config", dir / "pc.log") == 0);
    const std::string dump = slurp(dir / "pc.log");
    CHECK(dump.find("r=0.15") != std::string::npos);
    CHECK(dump.find("l=0.7") != std::string::npos);
    CHECK(dump.find("k=3") != std::string::npos);
}

TEST_CASE("config file values are applied and flags override them") {
    TempDir dir;
    write(dir / "cfg.toml", "[restore]\nr=0.3\n");
    CHECK(run_cli("--config " + (dir / "cfg.toml").string() + " restore --print-config",
                  dir / "c1.log") == 0);
    CHECK(slurp(dir / "c1.log").find("r=0.3") != std::string::npos);
    CHECK(run_cli("--config " + (dir / "cfg.toml").string() + " restore --r 0.2 --print-config",
                  dir / "c2.log") == 0);
    CHECK(slurp(dir / "c2.log").find("r=0.2") != std::string::npos);
}

TEST_CASE("full pipeline: synth, restore, gen-qa, mock baseline, score") {
    TempDir dir;
    write(dir / "spec.json",
          R"({"rows": 4, "columns": 3, "line_height": 20, "column_gap": 30, "seed": 11})");
    REQUIRE(run_cli("synth --spec " + (dir / "spec.json").string() + " --n 5 --out " +
                        (dir / "docs").string(),
                    dir / "p1.log") == 0);
    REQUIRE(run_cli("restore --in " + (dir / "docs").string() + " --out " +
                        (dir / "restored").string(),
                    dir / "p2.log") == 0);

    // Annotations keyed to the synthetic image ids.
    fs::create_directories(dir / "ann");
    Rng rng(404);
    const auto facts = small_fact_base();
    std::vector<ReportAnnotation> corpus;
    for (int i = 0; i < 5; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "synth-%04d", i);
        ReportAnnotation ann = random_annotation(rng, name, facts);
        corpus.push_back(ann);
        write(dir / "ann" / (std::string(name) + ".json"), serialize_annotation_json(ann));
    }
    write(dir / "facts.json", FactBase::from_facts(facts).to_json());

    REQUIRE(run_cli("gen-qa --annotations " + (dir / "ann").string() + " --facts " +
                        (dir / "facts.json").string() + " --seed 5 --unanswerable-fraction 0" +
                        " --out " + (dir / "bank.jsonl").string(),
                    dir / "p3.log") == 0);

    const auto bank = bank_from_jsonl(slurp(dir / "bank.jsonl"));
    REQUIRE(!bank.empty());
    std::map<std::string, std::string> gold;
    for (const auto& item : bank) gold[item.qa_id] = item.answer;

    MockEndpoint mock([&](const std::string& qa_id) { return gold[qa_id]; });
    write(dir / "endpoint.json",
          std::string(R"({"base_url": ")") + mock.url() + R"(", "model": "mock"})");

    REQUIRE(run_cli("run-baseline --bank " + (dir / "bank.jsonl").string() + " --docs " +
                        (dir / "restored").string() + " --endpoint " +
                        (dir / "endpoint.json").string() + " --facts " +
                        (dir / "facts.json").string() + " --out " +
                        (dir / "preds.jsonl").string(),
                    dir / "p4.log") == 0);

    REQUIRE(run_cli("score --bank " + (dir / "bank.jsonl").string() + " --preds " +
                        (dir / "preds.jsonl").string() + " --annotations " +
                        (dir / "ann").string() + " --out " + (dir / "report.json").string(),
                    dir / "p5.log") == 0);

    const json report = json::parse(slurp(dir / "report.json"));
    for (const auto& [row, cell] : report["per_task"].items()) {
        INFO(row);
        CHECK(cell["soft_accuracy"].get<double>() == 1.0);
        if (cell.contains("rouge_l")) CHECK(cell["rouge_l"].get<double>() == 1.0);
    }

    // Determinism: a second gen-qa run produces identical bytes.
    REQUIRE(run_cli("gen-qa --annotations " + (dir / "ann").string() + " --facts " +
                        (dir / "facts.json").string() + " --seed 5 --unanswerable-fraction 0" +
                        " --out " + (dir / "bank2.jsonl").string(),
                    dir / "p6.log") == 0);
    CHECK(slurp(dir / "bank.jsonl") == slurp(dir / "bank2.jsonl"));
}

TEST_CASE("dry run writes prompts without an endpoint") {
    TempDir dir;
    write(dir / "spec.json", R"({"rows": 2, "columns": 2, "seed": 3})");
    REQUIRE(run_cli("synth --spec " + (dir / "spec.json").string() + " --n 1 --out " +
                        (dir / "docs").string(),
                    dir / "d1.log") == 0);
    REQUIRE(run_cli("restore --in " + (dir / "docs").string() + " --out " +
                        (dir / "restored").string(),
                    dir / "d2.log") == 0);

    fs::create_directories(dir / "ann");
    ReportAnnotation ann = consistent_lab_annotation("synth-0000");
    write(dir / "ann" / "synth-0000.json", serialize_annotation_json(ann));
    REQUIRE(run_cli("gen-qa --annotations " + (dir / "ann").string() + " --seed 1 --out " +
                        (dir / "bank.jsonl").string(),
                    dir / "d3.log") == 0);

    write(dir / "endpoint.json", R"({"base_url": "http://unused.invalid/generate"})");
    CHECK(run_cli("run-baseline --dry-run --bank " + (dir / "bank.jsonl").string() + " --docs " +
                      (dir / "restored").string() + " --endpoint " +
                      (dir / "endpoint.json").string() + " --out " + (dir / "prompts.jsonl").string(),
                  dir / "d4.log") == 0);
    CHECK(slurp(dir / "prompts.jsonl").find("\"prompt\"") != std::string::npos);
}
