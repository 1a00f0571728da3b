// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "valfuse/io.hpp"
#include "valfuse/metrics.hpp"
#include "valfuse/retrieval.hpp"
#include "valfuse/synth.hpp"

using namespace valfuse;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("valfuse_cli_test_" +
                                                  std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct RunResult {
    int exit_code;
    json report;
};

RunResult run_cli(const TempDir& dir, const std::string& args) {
    const std::string out = dir / "stdout.json";
    const std::string cmd = std::string(VALFUSE_BIN) + " " + args + " > " + out + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult result{WIFEXITED(status) ? WEXITSTATUS(status) : -1, json()};
    std::ifstream in(out);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!text.empty()) result.report = json::parse(text, nullptr, false);
    return result;
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("synth + optimize + apply pipeline matches the library") {
    TempDir dir;
    auto r = run_cli(dir, "synth retrieval --seed 5 --queries 30 --gallery 10 "
                          "--qualities 0.8 0.3 --out-prefix " + (dir / "synth"));
    REQUIRE(r.exit_code == 0);

    auto opt = run_cli(dir, "ensemble-retrieval optimize --matrices " + (dir / "synth_model0.json") +
                               " " + (dir / "synth_model1.json") + " --gt " + (dir / "synth_gt.json") +
                               " --steps 40 --seed 7 --out " + (dir / "weights.json"));
    REQUIRE(opt.exit_code == 0);
    CHECK(opt.report["steps"] == 40);

    // library path on the same data
    synth::SynthConfig config;
    config.seed = 5;
    config.n_queries = 30;
    config.n_gallery = 10;
    config.qualities = {0.8, 0.3};
    auto problem = synth::gen_retrieval_problem(config);
    auto lib = optimize_retrieval_weights(problem, 40, 7);
    CHECK(opt.report["objective"].get<double>() == lib.objective);
    auto cli_w = io::load_weights(dir / "weights.json");
    CHECK(cli_w.values() == lib.weights.values());

    auto apply = run_cli(dir, "ensemble-retrieval apply --matrices " + (dir / "synth_model0.json") +
                                  " " + (dir / "synth_model1.json") + " --weights " +
                                  (dir / "weights.json") + " --out " + (dir / "fused.json"));
    REQUIRE(apply.exit_code == 0);
    auto fused_cli = io::load_similarity_matrix(dir / "fused.json");
    auto fused_lib = fuse_matrices(problem.matrices, lib.weights);
    CHECK(fused_cli.scores() == fused_lib.scores());

    auto eval = run_cli(dir, "evaluate --metric mean-recall --matrix " + (dir / "fused.json") +
                                 " --gt " + (dir / "synth_gt.json"));
    REQUIRE(eval.exit_code == 0);
    CHECK(eval.report["value"].get<double>() ==
          doctest::Approx(mean_recall(fused_lib, problem.gt)).epsilon(1e-12));
}

TEST_CASE("same invocation twice gives byte-identical outputs") {
    TempDir dir;
    const std::string prefix_a = dir / "a";
    const std::string prefix_b = dir / "b";
    REQUIRE(run_cli(dir, "synth retrieval --seed 11 --queries 20 --gallery 8 --qualities 0.5 "
                         "--out-prefix " + prefix_a).exit_code == 0);
    REQUIRE(run_cli(dir, "synth retrieval --seed 11 --queries 20 --gallery 8 --qualities 0.5 "
                         "--out-prefix " + prefix_b).exit_code == 0);
    CHECK(slurp(prefix_a + "_model0.json") == slurp(prefix_b + "_model0.json"));
    CHECK(slurp(prefix_a + "_gt.json") == slurp(prefix_b + "_gt.json"));
}

TEST_CASE("documented defaults appear in reports") {
    TempDir dir;
    REQUIRE(run_cli(dir, "synth moments --seed 1 --count 50 --videos 3 --out-prefix " +
                         (dir / "m")).exit_code == 0);
    auto nms = run_cli(dir, "vcmr nms --input " + (dir / "m_moments.json") + " --out " +
                                (dir / "kept.json"));
    REQUIRE(nms.exit_code == 0);
    CHECK(nms.report["iou"].get<double>() == 0.7);
    CHECK(nms.report["max_keep"] == 100);

    // zero-flag optimize default is 300 steps
    REQUIRE(run_cli(dir, "synth retrieval --seed 2 --queries 10 --gallery 5 --qualities 0.9 "
                         "--out-prefix " + (dir / "s")).exit_code == 0);
    auto opt = run_cli(dir, "ensemble-retrieval optimize --matrices " + (dir / "s_model0.json") +
                                " --gt " + (dir / "s_gt.json"));
    REQUIRE(opt.exit_code == 0);
    CHECK(opt.report["steps"] == 300);
}

TEST_CASE("qa train/predict via CLI") {
    TempDir dir;
    REQUIRE(run_cli(dir, "synth qa --seed 3 --examples 40 --answers 4 --qualities 1.0 0.0 "
                         "--out-prefix " + (dir / "qa")).exit_code == 0);
    auto train = run_cli(dir, "ensemble-qa train --scores " + (dir / "qa_scores.json") +
                                  " --labels " + (dir / "qa_labels.json") + " --out " +
                                  (dir / "qaw.json"));
    REQUIRE(train.exit_code == 0);
    CHECK(train.report["train_accuracy"].get<double>() == doctest::Approx(1.0));

    auto predict = run_cli(dir, "ensemble-qa predict --scores " + (dir / "qa_scores.json") +
                                    " --weights " + (dir / "qaw.json") + " --labels " +
                                    (dir / "qa_labels.json") + " --out " + (dir / "pred.json"));
    REQUIRE(predict.exit_code == 0);
    CHECK(predict.report["accuracy"].get<double>() == doctest::Approx(1.0));

    auto eval = run_cli(dir, "evaluate --metric accuracy --predictions " + (dir / "pred.json") +
                                 " --labels " + (dir / "qa_labels.json"));
    REQUIRE(eval.exit_code == 0);
    CHECK(eval.report["value"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("caption selection and top-k via CLI") {
    TempDir dir;
    REQUIRE(run_cli(dir, "synth captions --seed 4 --sets 5 --captions 3 --qualities 0.7 "
                         "--out-prefix " + (dir / "c")).exit_code == 0);
    auto select = run_cli(dir, "ensemble-caption select --captions " + (dir / "c_captions.json") +
                                   " --out " + (dir / "sel.json"));
    REQUIRE(select.exit_code == 0);
    CHECK(select.report["n_sets"] == 5);
    // duplicated reference (ceil(0.7*3)=3 -> wait, 2.1 -> 3) is selected at index 0
    for (const auto& sel : select.report["selections"]) {
        CHECK(sel["selected_index"] == 0);
    }

    std::ofstream models(dir / "models.json");
    models << R"({"models":[{"model_id":"a","validation_score":1.0,"prediction_path":""},)"
           << R"({"model_id":"b","validation_score":3.0,"prediction_path":""}]})";
    models.close();
    auto topk = run_cli(dir, "select-topk --models " + (dir / "models.json") +
                                 " --macro-task captioning");
    REQUIRE(topk.exit_code == 0);
    CHECK(topk.report["k"] == 8);
    CHECK(topk.report["selected"][0] == "b");
}

TEST_CASE("augment-subtitles via CLI") {
    TempDir dir;
    std::ofstream subs(dir / "subs.json");
    subs << R"({"subtitles":[{"subtitle":"add the pasta","regions":[["boiling water","silver pot"]]},)"
         << R"({"subtitle":"plain line"}]})";
    subs.close();
    auto r = run_cli(dir, "augment-subtitles --input " + (dir / "subs.json") + " --out " +
                              (dir / "aug.json"));
    REQUIRE(r.exit_code == 0);
    auto out = json::parse(slurp(dir / "aug.json"));
    CHECK(out["subtitles"][0] == "add the pasta [SEP] boiling water, silver pot");
    CHECK(out["subtitles"][1] == "plain line");
}

TEST_CASE("exit codes distinguish error classes") {
    TempDir dir;
    // argument error: unknown subcommand flag arrangement
    CHECK(run_cli(dir, "no-such-command").exit_code == 2);
    // schema error: missing input file
    CHECK(run_cli(dir, "vcmr nms --input " + (dir / "missing.json")).exit_code == 3);
    // argument error surfaced from the library: bad metric
    CHECK(run_cli(dir, "evaluate --metric bogus").exit_code == 2);
}
