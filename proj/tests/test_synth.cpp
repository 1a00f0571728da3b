// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "valfuse/consensus.hpp"
#include "valfuse/errors.hpp"
#include "valfuse/metrics.hpp"
#include "valfuse/qa.hpp"
#include "valfuse/synth.hpp"

using namespace valfuse;

TEST_CASE("gen_retrieval_problem") {
    SUBCASE("quality 1.0 gives perfect single-model recall") {
        synth::SynthConfig config;
        config.seed = 1;
        config.n_queries = 50;
        config.n_gallery = 20;
        config.qualities = {1.0};
        auto problem = synth::gen_retrieval_problem(config);
        CHECK(mean_recall(problem.matrices[0], problem.gt) == doctest::Approx(1.0));
    }
    SUBCASE("same seed gives identical matrices") {
        synth::SynthConfig config;
        config.seed = 9;
        config.n_queries = 20;
        config.n_gallery = 10;
        config.qualities = {0.5, 0.2};
        auto a = synth::gen_retrieval_problem(config);
        auto b = synth::gen_retrieval_problem(config);
        for (std::size_t i = 0; i < a.matrices.size(); ++i) {
            CHECK(a.matrices[i].scores() == b.matrices[i].scores());
        }
        CHECK(a.gt.targets() == b.gt.targets());
    }
    SUBCASE("quality 0.0 is pure noise") {
        synth::SynthConfig config;
        config.n_queries = 500;
        config.n_gallery = 100;
        config.qualities = {0.0};
        for (std::uint64_t seed : {1, 2, 3}) {
            config.seed = seed;
            auto problem = synth::gen_retrieval_problem(config);
            const double r1 = recall_at_k(problem.matrices[0], problem.gt, 1);
            CHECK(r1 >= 0.0);
            CHECK(r1 <= 0.04);
        }
    }
    SUBCASE("complementary models are good only on their slice") {
        synth::SynthConfig config;
        config.seed = 33;
        config.n_queries = 90;
        config.n_gallery = 30;
        config.qualities = {1.0, 1.0, 1.0};
        config.complementary = true;
        auto problem = synth::gen_retrieval_problem(config);
        for (std::size_t m = 0; m < 3; ++m) {
            std::size_t hits_own = 0, own = 0;
            for (std::size_t q = 0; q < config.n_queries; ++q) {
                std::span<const double> row(problem.matrices[m].row(q), config.n_gallery);
                const bool top = rank_of_truth(row, problem.gt.target(q)) == 1;
                if (q % 3 == m) {
                    ++own;
                    if (top) ++hits_own;
                }
            }
            CHECK(hits_own == own);  // quality 1.0 on the owned slice
        }
    }
}

TEST_CASE("grid_search_weights") {
    SUBCASE("single model returns [1]") {
        synth::SynthConfig config;
        config.seed = 2;
        config.n_queries = 10;
        config.n_gallery = 5;
        config.qualities = {0.7};
        auto problem = synth::gen_retrieval_problem(config);
        auto [w, obj] = synth::grid_search_weights(problem, 0.5);
        CHECK(w.size() == 1);
        CHECK(w[0] == doctest::Approx(1.0));
    }
    SUBCASE("never worse than any pure single model") {
        synth::SynthConfig config;
        config.seed = 13;
        config.n_queries = 60;
        config.n_gallery = 20;
        config.qualities = {0.6, 0.3};
        auto problem = synth::gen_retrieval_problem(config);
        auto [w, obj] = synth::grid_search_weights(problem, 0.05);
        CHECK(obj >= evaluate_weights(problem, EnsembleWeights({1.0, 0.0})) - 1e-12);
        CHECK(obj >= evaluate_weights(problem, EnsembleWeights({0.0, 1.0})) - 1e-12);
    }
    SUBCASE("guards") {
        synth::SynthConfig config;
        config.seed = 2;
        config.n_queries = 4;
        config.n_gallery = 4;
        config.qualities = {0.5, 0.5, 0.5, 0.5, 0.5};
        auto problem = synth::gen_retrieval_problem(config);
        CHECK_THROWS_AS(synth::grid_search_weights(problem, 0.5), ArgumentError);

        config.qualities = {0.5, 0.5};
        auto small = synth::gen_retrieval_problem(config);
        CHECK_THROWS_AS(synth::grid_search_weights(small, 0.3), ArgumentError);
    }
}

TEST_CASE("reference_nms equals nms_moments on random candidates") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto cands = synth::gen_moments(seed, 300, 5);
        auto fast = nms_moments(cands, 0.7, 100);
        auto ref = synth::reference_nms(cands, 0.7, 100);
        REQUIRE(fast.size() == ref.size());
        for (std::size_t i = 0; i < fast.size(); ++i) {
            CHECK(fast[i].video_id == ref[i].video_id);
            CHECK(fast[i].t_start == ref[i].t_start);
            CHECK(fast[i].t_end == ref[i].t_end);
            CHECK(fast[i].score == ref[i].score);
        }
    }
    CHECK(synth::reference_nms({}, 0.7, 100).empty());
}

TEST_CASE("gen_moments includes exact-0.7 IoU pairs") {
    auto cands = synth::gen_moments(3, 500, 4);
    bool found = false;
    for (std::size_t i = 0; i < cands.size() && !found; ++i) {
        for (std::size_t j = i + 1; j < cands.size(); ++j) {
            if (temporal_iou(cands[i], cands[j]) == 0.7) {
                found = true;
                break;
            }
        }
    }
    CHECK(found);
}

TEST_CASE("gen_qa_problem") {
    synth::SynthConfig config;
    config.seed = 21;
    config.n_queries = 80;
    config.n_answers = 4;
    config.qualities = {1.0};
    auto [x, labels] = synth::gen_qa_problem(config);
    CHECK(accuracy(qa_predict(x, {1.0}), labels) == doctest::Approx(1.0));

    auto [x2, labels2] = synth::gen_qa_problem(config);
    CHECK(x.scores() == x2.scores());
    CHECK(labels.values() == labels2.values());
}

TEST_CASE("gen_caption_sets") {
    synth::SynthConfig config;
    config.seed = 7;
    config.n_captions = 3;
    config.qualities = {0.6};  // ceil(0.6 * 3) = 2 duplicates of the reference
    auto sets = synth::gen_caption_sets(config, 25);
    std::vector<EmbeddingProvider> providers{builtin_trigram_provider()};
    for (const auto& set : sets) {
        REQUIRE(set.captions.size() == 3);
        CHECK(set.captions[0].text == set.captions[1].text);
        CHECK(set.captions[2].text != set.captions[0].text);
        // the duplicated reference wins consensus
        CHECK(select_caption(set, providers).selected_text == set.captions[0].text);
    }
    auto again = synth::gen_caption_sets(config, 25);
    for (std::size_t i = 0; i < sets.size(); ++i) {
        CHECK(sets[i].captions[0].text == again[i].captions[0].text);
    }
}
