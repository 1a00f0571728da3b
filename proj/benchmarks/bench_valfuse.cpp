// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "valfuse/consensus.hpp"
#include "valfuse/metrics.hpp"
#include "valfuse/retrieval.hpp"
#include "valfuse/synth.hpp"
#include "valfuse/tpe.hpp"

using namespace valfuse;

namespace {

FusionProblem make_problem(std::size_t n_models, std::size_t n_queries, std::size_t n_gallery) {
    synth::SynthConfig config;
    config.seed = 42;
    config.n_queries = n_queries;
    config.n_gallery = n_gallery;
    config.qualities.assign(n_models, 0.5);
    return synth::gen_retrieval_problem(config);
}

void BM_fuse_matrices(benchmark::State& state) {
    auto problem = make_problem(static_cast<std::size_t>(state.range(0)), 500, 100);
    EnsembleWeights w(std::vector<double>(problem.n_models(),
                                          1.0 / static_cast<double>(problem.n_models())));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fuse_matrices(problem.matrices, w));
    }
}
BENCHMARK(BM_fuse_matrices)->Arg(2)->Arg(4)->Arg(8);

void BM_mean_recall(benchmark::State& state) {
    auto problem = make_problem(1, static_cast<std::size_t>(state.range(0)), 200);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mean_recall(problem.matrices[0], problem.gt));
    }
}
BENCHMARK(BM_mean_recall)->Arg(100)->Arg(1000);

void BM_nms_moments(benchmark::State& state) {
    auto candidates = synth::gen_moments(7, static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nms_moments(candidates, 0.7, 100));
    }
}
BENCHMARK(BM_nms_moments)->Arg(1000)->Arg(10000);

void BM_tpe_maximize(benchmark::State& state) {
    auto objective = [](const std::vector<double>& p) {
        double v = 0.0;
        for (double x : p) v -= (x - 0.63) * (x - 0.63);
        return v;
    };
    const std::size_t dim = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tpe_maximize(objective, dim, 100, 1));
    }
}
BENCHMARK(BM_tpe_maximize)->Arg(1)->Arg(4);

void BM_trigram_embed(benchmark::State& state) {
    const std::string text =
        "a man slices a red onion on a wooden cutting board while a pot of water boils";
    for (auto _ : state) {
        benchmark::DoNotOptimize(trigram_embed(text));
    }
}
BENCHMARK(BM_trigram_embed);

void BM_select_caption(benchmark::State& state) {
    synth::SynthConfig config;
    config.seed = 9;
    config.n_captions = static_cast<std::size_t>(state.range(0));
    config.qualities = {0.5};
    auto sets = synth::gen_caption_sets(config, 1);
    std::vector<EmbeddingProvider> providers{builtin_trigram_provider()};
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_caption(sets[0], providers));
    }
}
BENCHMARK(BM_select_caption)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
