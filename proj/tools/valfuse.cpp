// SPDX-License-Identifier: Apache-2.0
//
// valfuse: task-aware ensembling for video-and-language model predictions.
// Subcommands cover retrieval weight optimization and fusion, temporal NMS
// for moment retrieval, the QA stacker, caption consensus selection, metric
// evaluation, top-K model selection, subtitle augmentation, and synthetic
// data generation. Every run prints a JSON report on stdout and is
// deterministic given --seed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "valfuse/consensus.hpp"
#include "valfuse/errors.hpp"
#include "valfuse/io.hpp"
#include "valfuse/metrics.hpp"
#include "valfuse/qa.hpp"
#include "valfuse/retrieval.hpp"
#include "valfuse/synth.hpp"
#include "valfuse/tpe.hpp"

namespace {

using json = nlohmann::json;
using namespace valfuse;

void print_report(const json& report) { std::cout << report.dump(2) << std::endl; }

unsigned resolve_threads(unsigned flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("VALFUSE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

std::vector<SimilarityMatrix> load_matrices(const std::vector<std::string>& paths) {
    if (paths.empty()) throw ArgumentError("at least one matrix file is required");
    std::vector<SimilarityMatrix> matrices;
    matrices.reserve(paths.size());
    for (const auto& p : paths) matrices.push_back(io::load_similarity_matrix(p));
    return matrices;
}

std::vector<EmbeddingProvider> resolve_providers(const std::vector<std::string>& specs) {
    std::vector<EmbeddingProvider> providers;
    for (const auto& spec : specs) {
        if (spec == "builtin") {
            providers.push_back(builtin_trigram_provider());
        } else {
            providers.push_back(io::load_embedding_provider(spec));
        }
    }
    if (providers.empty()) providers.push_back(builtin_trigram_provider());
    return providers;
}

struct Options {
    std::vector<std::string> matrices;
    std::string gt_path;
    std::string weights_path;
    std::string input_path;
    std::string labels_path;
    std::string scores_path;
    std::string predictions_path;
    std::string captions_path;
    std::string models_path;
    std::string out_path;
    std::string out_prefix;
    std::vector<std::string> providers;
    std::string metric;
    std::string macro_task;
    std::vector<double> raw_scores;
    std::vector<double> qualities;

    std::size_t steps = 300;
    std::uint64_t seed = 0;
    double gamma = 0.25;
    std::size_t startup = 20;
    std::size_t candidates = 24;
    double iou = 0.7;
    std::size_t max_keep = 100;
    double lr = 0.1;
    std::size_t epochs = 500;
    double epsilon = 1e-8;
    std::size_t k = 0;
    std::size_t recall_k = 1;
    unsigned threads = 0;
    std::size_t n_queries = 100;
    std::size_t n_gallery = 50;
    std::size_t n_answers = 4;
    std::size_t n_captions = 3;
    std::size_t n_sets = 10;
    std::size_t count = 1000;
    std::size_t n_videos = 10;
    double noise_scale = 0.5;
    bool complementary = false;
};

int run_retrieval_optimize(const Options& o) {
    FusionProblem problem{load_matrices(o.matrices), io::load_ground_truth(o.gt_path)};
    TpeConfig config;
    config.gamma = o.gamma;
    config.n_startup = o.startup;
    config.n_candidates = o.candidates;
    auto result = optimize_retrieval_weights(problem, o.steps, o.seed, config,
                                             resolve_threads(o.threads));
    if (!o.out_path.empty()) io::store_weights(result.weights, o.out_path);
    print_report(json{{"command", "ensemble-retrieval optimize"},
                      {"steps", o.steps},
                      {"seed", o.seed},
                      {"gamma", config.gamma},
                      {"startup", config.n_startup},
                      {"candidates", config.n_candidates},
                      {"n_models", problem.n_models()},
                      {"objective", result.objective},
                      {"weights", result.weights.values()},
                      {"out", o.out_path}});
    return 0;
}

int run_retrieval_apply(const Options& o) {
    auto matrices = load_matrices(o.matrices);
    auto weights = io::load_weights(o.weights_path);
    auto fused = fuse_matrices(matrices, weights);
    io::store_similarity_matrix(fused, o.out_path);
    print_report(json{{"command", "ensemble-retrieval apply"},
                      {"n_models", matrices.size()},
                      {"n_queries", fused.n_queries()},
                      {"n_gallery", fused.n_gallery()},
                      {"out", o.out_path}});
    return 0;
}

int run_vcmr_nms(const Options& o) {
    auto moments = io::load_moments(o.input_path);
    auto kept = nms_moments(moments, o.iou, o.max_keep);
    if (!o.out_path.empty()) io::store_moments(kept, o.out_path);
    print_report(json{{"command", "vcmr nms"},
                      {"iou", o.iou},
                      {"max_keep", o.max_keep},
                      {"n_input", moments.size()},
                      {"n_kept", kept.size()},
                      {"out", o.out_path}});
    return 0;
}

int run_qa_train(const Options& o) {
    auto data = io::load_qa_scores(o.scores_path);
    auto labels = io::load_qa_labels(o.labels_path);
    QaTrainConfig config;
    config.learning_rate = o.lr;
    config.max_epochs = o.epochs;
    config.convergence_epsilon = o.epsilon;
    config.seed = o.seed;
    auto trained = train_qa_weights(data.scores, labels, config);
    if (!o.out_path.empty()) io::store_raw_weights(trained.w, o.out_path);
    const double train_acc = accuracy(qa_predict(data.scores, trained.w), labels);
    print_report(json{{"command", "ensemble-qa train"},
                      {"learning_rate", config.learning_rate},
                      {"max_epochs", config.max_epochs},
                      {"epochs_run", trained.epochs_run},
                      {"final_loss", trained.final_loss},
                      {"weights", trained.w},
                      {"weights_normalized", trained.normalized()},
                      {"train_accuracy", train_acc},
                      {"out", o.out_path}});
    return 0;
}

int run_qa_predict(const Options& o) {
    auto data = io::load_qa_scores(o.scores_path);
    auto w = io::load_raw_weights(o.weights_path);
    auto predicted = qa_predict(data.scores, w);
    if (!o.out_path.empty()) io::store_predictions(predicted, o.out_path);
    json report{{"command", "ensemble-qa predict"},
                {"n_examples", predicted.size()},
                {"out", o.out_path}};
    if (!o.labels_path.empty()) {
        report["accuracy"] = accuracy(predicted, io::load_qa_labels(o.labels_path));
    }
    print_report(report);
    return 0;
}

int run_caption_select(const Options& o) {
    auto sets = io::load_caption_sets(o.captions_path);
    auto providers = resolve_providers(o.providers);
    json selections = json::array();
    for (const auto& set : sets) {
        auto result = select_caption(set, providers);
        selections.push_back(json{{"video_id", set.video_id},
                                  {"selected_index", result.selected_index},
                                  {"selected_model_id",
                                   set.captions[result.selected_index].model_id},
                                  {"selected_text", result.selected_text},
                                  {"scores", result.scores}});
    }
    if (!o.out_path.empty()) {
        std::ofstream out(o.out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw SchemaError("cannot open file for writing: " + o.out_path);
        out << json{{"selections", selections}}.dump(2) << "\n";
    }
    json provider_ids = json::array();
    for (const auto& p : providers) provider_ids.push_back(p.provider_id);
    print_report(json{{"command", "ensemble-caption select"},
                      {"n_sets", sets.size()},
                      {"providers", provider_ids},
                      {"selections", selections},
                      {"out", o.out_path}});
    return 0;
}

int run_evaluate(const Options& o) {
    json report{{"command", "evaluate"}, {"metric", o.metric}};
    if (o.metric == "mean-recall" || o.metric == "recall") {
        auto matrix = io::load_similarity_matrix(o.input_path);
        auto gt = io::load_ground_truth(o.gt_path);
        if (o.metric == "mean-recall") {
            report["value"] = mean_recall(matrix, gt);
        } else {
            report["k"] = o.recall_k;
            report["value"] = recall_at_k(matrix, gt, o.recall_k);
        }
    } else if (o.metric == "accuracy") {
        report["value"] = accuracy(io::load_predictions(o.predictions_path),
                                   io::load_qa_labels(o.labels_path));
    } else if (o.metric == "meta-average") {
        report["value"] = meta_average(o.raw_scores);
    } else {
        throw ArgumentError("unknown metric '" + o.metric + "'");
    }
    print_report(report);
    return 0;
}

int run_select_topk(const Options& o) {
    auto records = io::load_model_records(o.models_path);
    const std::size_t k = o.k > 0 ? o.k : io::default_top_k(o.macro_task);
    auto selected = io::select_top_k_models(records, k);
    if (!o.out_path.empty()) io::store_model_records(selected, o.out_path);
    json ids = json::array();
    for (const auto& r : selected) ids.push_back(r.model_id);
    print_report(json{{"command", "select-topk"},
                      {"macro_task", o.macro_task},
                      {"k", k},
                      {"selected", ids},
                      {"out", o.out_path}});
    return 0;
}

int run_augment(const Options& o) {
    auto entries = io::load_subtitles(o.input_path);
    std::vector<std::string> lines;
    lines.reserve(entries.size());
    for (const auto& e : entries) {
        lines.push_back(io::augment_subtitle_with_concepts(e.subtitle, e.regions));
    }
    if (!o.out_path.empty()) io::store_augmented_subtitles(lines, o.out_path);
    print_report(json{{"command", "augment-subtitles"},
                      {"n_subtitles", lines.size()},
                      {"out", o.out_path}});
    return 0;
}

synth::SynthConfig make_synth_config(const Options& o) {
    synth::SynthConfig config;
    config.seed = o.seed;
    config.n_queries = o.n_queries;
    config.n_gallery = o.n_gallery;
    config.n_answers = o.n_answers;
    config.n_captions = o.n_captions;
    if (!o.qualities.empty()) config.qualities = o.qualities;
    config.noise_scale = o.noise_scale;
    config.complementary = o.complementary;
    return config;
}

int run_synth_retrieval(const Options& o) {
    auto config = make_synth_config(o);
    auto problem = synth::gen_retrieval_problem(config);
    json files = json::array();
    for (std::size_t i = 0; i < problem.matrices.size(); ++i) {
        const std::string path = o.out_prefix + "_model" + std::to_string(i) + ".json";
        io::store_similarity_matrix(problem.matrices[i], path);
        files.push_back(path);
    }
    const std::string gt_path = o.out_prefix + "_gt.json";
    io::store_ground_truth(problem.gt, gt_path);
    print_report(json{{"command", "synth retrieval"},
                      {"seed", o.seed},
                      {"matrices", files},
                      {"gt", gt_path}});
    return 0;
}

int run_synth_qa(const Options& o) {
    auto config = make_synth_config(o);
    auto [scores, labels] = synth::gen_qa_problem(config);
    io::QaDataset data{std::move(scores), {}, {}};
    for (std::size_t i = 0; i < data.scores.n_models(); ++i) {
        data.model_ids.push_back("model" + std::to_string(i));
    }
    for (std::size_t b = 0; b < data.scores.n_examples(); ++b) {
        data.example_ids.push_back("ex" + std::to_string(b));
    }
    const std::string scores_path = o.out_prefix + "_scores.json";
    const std::string labels_path = o.out_prefix + "_labels.json";
    io::store_qa_scores(data, scores_path);
    io::store_qa_labels(labels, labels_path);
    print_report(json{{"command", "synth qa"},
                      {"seed", o.seed},
                      {"scores", scores_path},
                      {"labels", labels_path}});
    return 0;
}

int run_synth_captions(const Options& o) {
    auto config = make_synth_config(o);
    auto sets = synth::gen_caption_sets(config, o.n_sets);
    const std::string path = o.out_prefix + "_captions.json";
    io::store_caption_sets(sets, path);
    print_report(json{{"command", "synth captions"},
                      {"seed", o.seed},
                      {"n_sets", sets.size()},
                      {"captions", path}});
    return 0;
}

int run_synth_moments(const Options& o) {
    auto moments = synth::gen_moments(o.seed, o.count, o.n_videos);
    const std::string path = o.out_prefix + "_moments.json";
    io::store_moments(moments, path);
    print_report(json{{"command", "synth moments"},
                      {"seed", o.seed},
                      {"n_moments", moments.size()},
                      {"moments", path}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Task-aware ensembling for video-and-language model predictions"};
    app.require_subcommand(1);
    Options o;
    int (*action)(const Options&) = nullptr;

    auto* retrieval = app.add_subcommand("ensemble-retrieval", "Similarity-matrix fusion");
    retrieval->require_subcommand(1);
    auto* optimize = retrieval->add_subcommand("optimize", "Search fusion weights by TPE");
    optimize->add_option("--matrices", o.matrices, "Similarity matrix files")->required();
    optimize->add_option("--gt", o.gt_path, "Ground truth file")->required();
    optimize->add_option("--steps", o.steps, "Optimization steps");
    optimize->add_option("--seed", o.seed, "Random seed");
    optimize->add_option("--gamma", o.gamma, "TPE good-split quantile");
    optimize->add_option("--startup", o.startup, "Random startup trials");
    optimize->add_option("--candidates", o.candidates, "Candidates per TPE step");
    optimize->add_option("--threads", o.threads, "Worker threads (or VALFUSE_THREADS)");
    optimize->add_option("--out", o.out_path, "Output weights file");
    optimize->callback([&] { action = run_retrieval_optimize; });

    auto* apply = retrieval->add_subcommand("apply", "Fuse matrices with given weights");
    apply->add_option("--matrices", o.matrices, "Similarity matrix files")->required();
    apply->add_option("--weights", o.weights_path, "Weights file")->required();
    apply->add_option("--out", o.out_path, "Output matrix file")->required();
    apply->callback([&] { action = run_retrieval_apply; });

    auto* vcmr = app.add_subcommand("vcmr", "Video corpus moment retrieval utilities");
    vcmr->require_subcommand(1);
    auto* nms = vcmr->add_subcommand("nms", "Temporal non-maximum suppression");
    nms->add_option("--input", o.input_path, "Moment candidates file")->required();
    nms->add_option("--iou", o.iou, "IoU suppression threshold");
    nms->add_option("--max-keep", o.max_keep, "Maximum moments to keep");
    nms->add_option("--out", o.out_path, "Output moments file");
    nms->callback([&] { action = run_vcmr_nms; });

    auto* qa = app.add_subcommand("ensemble-qa", "Learned QA score stacker");
    qa->require_subcommand(1);
    auto* train = qa->add_subcommand("train", "Train the bias-free linear stacker");
    train->add_option("--scores", o.scores_path, "QA score tensor file")->required();
    train->add_option("--labels", o.labels_path, "Label file")->required();
    train->add_option("--lr", o.lr, "Learning rate");
    train->add_option("--epochs", o.epochs, "Maximum epochs");
    train->add_option("--epsilon", o.epsilon, "Convergence loss delta");
    train->add_option("--seed", o.seed, "Random seed");
    train->add_option("--out", o.out_path, "Output weights file");
    train->callback([&] { action = run_qa_train; });

    auto* predict = qa->add_subcommand("predict", "Predict answers with trained weights");
    predict->add_option("--scores", o.scores_path, "QA score tensor file")->required();
    predict->add_option("--weights", o.weights_path, "Stacker weights file")->required();
    predict->add_option("--labels", o.labels_path, "Optional labels for accuracy reporting");
    predict->add_option("--out", o.out_path, "Output predictions file");
    predict->callback([&] { action = run_qa_predict; });

    auto* caption = app.add_subcommand("ensemble-caption", "Consensus caption selection");
    caption->require_subcommand(1);
    auto* select = caption->add_subcommand("select", "Pick the highest-consensus caption");
    select->add_option("--captions", o.captions_path, "Caption set file")->required();
    select->add_option("--providers", o.providers,
                       "Providers: 'builtin' or embedding file paths (default builtin)");
    select->add_option("--out", o.out_path, "Output selections file");
    select->callback([&] { action = run_caption_select; });

    auto* evaluate = app.add_subcommand("evaluate", "Compute a metric over result files");
    evaluate->add_option("--metric", o.metric, "mean-recall | recall | accuracy | meta-average")
        ->required();
    evaluate->add_option("--matrix", o.input_path, "Similarity matrix file");
    evaluate->add_option("--gt", o.gt_path, "Ground truth file");
    evaluate->add_option("--k", o.recall_k, "k for recall");
    evaluate->add_option("--predictions", o.predictions_path, "Predictions file");
    evaluate->add_option("--labels", o.labels_path, "Labels file");
    evaluate->add_option("--scores", o.raw_scores, "Scores for meta-average");
    evaluate->callback([&] { action = run_evaluate; });

    auto* topk = app.add_subcommand("select-topk", "Keep the top K models by validation score");
    topk->add_option("--models", o.models_path, "Model record file")->required();
    topk->add_option("--macro-task", o.macro_task, "captioning | qa | retrieval")->required();
    topk->add_option("--k", o.k, "Override the macro-task default (8/16/32)");
    topk->add_option("--out", o.out_path, "Output record file");
    topk->callback([&] { action = run_select_topk; });

    auto* augment = app.add_subcommand("augment-subtitles",
                                       "Attach visual concepts to subtitles with [SEP]");
    augment->add_option("--input", o.input_path, "Subtitle + concept file")->required();
    augment->add_option("--out", o.out_path, "Output file");
    augment->callback([&] { action = run_augment; });

    auto* synth_cmd = app.add_subcommand("synth", "Generate seeded synthetic data");
    synth_cmd->require_subcommand(1);
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--out-prefix", o.out_prefix, "Output file prefix")->required();
    };
    auto* sretr = synth_cmd->add_subcommand("retrieval", "Synthetic retrieval problem");
    add_common(sretr);
    sretr->add_option("--queries", o.n_queries, "Number of queries");
    sretr->add_option("--gallery", o.n_gallery, "Gallery size");
    sretr->add_option("--qualities", o.qualities, "Per-model quality in [0,1]");
    sretr->add_option("--noise-scale", o.noise_scale, "Margin noise scale");
    sretr->add_flag("--complementary", o.complementary,
                    "Each model is good only on its own query slice");
    sretr->callback([&] { action = run_synth_retrieval; });

    auto* sqa = synth_cmd->add_subcommand("qa", "Synthetic QA problem");
    add_common(sqa);
    sqa->add_option("--examples", o.n_queries, "Number of examples");
    sqa->add_option("--answers", o.n_answers, "Answer choices");
    sqa->add_option("--qualities", o.qualities, "Per-model quality in [0,1]");
    sqa->add_option("--noise-scale", o.noise_scale, "Margin noise scale");
    sqa->callback([&] { action = run_synth_qa; });

    auto* scap = synth_cmd->add_subcommand("captions", "Synthetic caption sets");
    add_common(scap);
    scap->add_option("--sets", o.n_sets, "Number of caption sets");
    scap->add_option("--captions", o.n_captions, "Captions per set");
    scap->add_option("--qualities", o.qualities, "Reference duplication quality");
    scap->callback([&] { action = run_synth_captions; });

    auto* smom = synth_cmd->add_subcommand("moments", "Synthetic moment candidates");
    add_common(smom);
    smom->add_option("--count", o.count, "Number of candidates");
    smom->add_option("--videos", o.n_videos, "Number of distinct videos");
    smom->callback([&] { action = run_synth_moments; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return action ? action(o) : 2;
    } catch (const ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 3;
    } catch (const ComputationError& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
