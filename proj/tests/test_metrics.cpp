// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "valfuse/errors.hpp"
#include "valfuse/metrics.hpp"
#include "valfuse/rng.hpp"
#include "valfuse/types.hpp"

using namespace valfuse;

namespace {

std::vector<std::string> make_ids(const char* prefix, std::size_t n) {
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = std::string(prefix) + std::to_string(i);
    return ids;
}

SimilarityMatrix identity_matrix(std::size_t n) {
    std::vector<double> scores(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) scores[i * n + i] = 1.0;
    return SimilarityMatrix(make_ids("q", n), make_ids("g", n), std::move(scores));
}

RetrievalGroundTruth diagonal_gt(std::size_t n) {
    std::vector<std::size_t> targets(n);
    std::iota(targets.begin(), targets.end(), 0);
    return RetrievalGroundTruth(std::move(targets), n);
}

// Independent sort-based rank oracle: position of the truth after a stable
// sort of (score desc, index asc).
std::size_t rank_oracle(const std::vector<double>& row, std::size_t truth) {
    std::vector<std::size_t> order(row.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (order[r] == truth) return r + 1;
    }
    return 0;
}

}  // namespace

TEST_CASE("rank_of_truth basics") {
    std::vector<double> a{0.9, 0.1, 0.5};
    CHECK(rank_of_truth(a, 0) == 1);

    std::vector<double> ties{0.5, 0.5, 0.5};
    CHECK(rank_of_truth(ties, 2) == 3);

    std::vector<double> b{0.1, 0.9, 0.8, 0.7};
    CHECK(rank_of_truth(b, 2) == rank_oracle(b, 2));
    CHECK(rank_of_truth(b, 2) == 2);

    CHECK_THROWS_AS(rank_of_truth(a, 3), ArgumentError);
}

TEST_CASE("rank_of_truth matches the sort oracle on random rows") {
    Rng rng(42);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t n = 1 + rng.uniform_index(20);
        std::vector<double> row(n);
        for (double& v : row) v = rng.uniform_index(6) * 0.2;  // force ties
        const std::size_t truth = rng.uniform_index(n);
        CHECK(rank_of_truth(row, truth) == rank_oracle(row, truth));
    }
}

TEST_CASE("rank multiset is permutation-consistent") {
    Rng rng(7);
    std::vector<double> row{0.3, 0.9, 0.9, 0.1, 0.5};
    std::vector<std::size_t> perm(row.size());
    std::iota(perm.begin(), perm.end(), 0);

    std::vector<std::size_t> base_ranks;
    for (std::size_t t = 0; t < row.size(); ++t) base_ranks.push_back(rank_of_truth(row, t));
    std::sort(base_ranks.begin(), base_ranks.end());

    for (int iter = 0; iter < 20; ++iter) {
        for (std::size_t i = perm.size(); i > 1; --i) {
            std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
        }
        std::vector<double> shuffled(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) shuffled[i] = row[perm[i]];
        std::vector<std::size_t> ranks;
        for (std::size_t t = 0; t < shuffled.size(); ++t) ranks.push_back(rank_of_truth(shuffled, t));
        std::sort(ranks.begin(), ranks.end());
        CHECK(ranks == base_ranks);
    }
}

TEST_CASE("recall_at_k") {
    auto id3 = identity_matrix(3);
    auto gt3 = diagonal_gt(3);
    CHECK(recall_at_k(id3, gt3, 1) == doctest::Approx(1.0));

    SimilarityMatrix s(make_ids("q", 2), make_ids("g", 2), {0.1, 0.9, 0.8, 0.2});
    RetrievalGroundTruth gt({0, 0}, 2);
    CHECK(recall_at_k(s, gt, 1) == doctest::Approx(0.5));
    CHECK(recall_at_k(s, gt, 2) == doctest::Approx(1.0));

    CHECK_THROWS_AS(recall_at_k(s, gt, 0), ArgumentError);

    // monotone non-decreasing in k
    double prev = 0.0;
    for (std::size_t k = 1; k <= 4; ++k) {
        const double r = recall_at_k(s, gt, k);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("mean_recall") {
    CHECK(mean_recall(identity_matrix(12), diagonal_gt(12)) == doctest::Approx(1.0));

    // Every truth ranks exactly 6th in a 12-item gallery.
    const std::size_t n = 12;
    std::vector<double> scores(n * n);
    std::vector<std::size_t> targets(n);
    for (std::size_t q = 0; q < n; ++q) {
        for (std::size_t g = 0; g < n; ++g) scores[q * n + g] = 1.0 - 0.05 * static_cast<double>(g);
        targets[q] = 5;  // descending scores put index 5 at rank 6
    }
    SimilarityMatrix s(make_ids("q", n), make_ids("g", n), std::move(scores));
    RetrievalGroundTruth gt(std::move(targets), n);
    CHECK(mean_recall(s, gt) == doctest::Approx(1.0 / 3.0));

    // N_g = 2, truth always rank 2: k clipped so R@5 = R@10 = 1.
    SimilarityMatrix s2(make_ids("q", 3), make_ids("g", 2), {1, 0, 1, 0, 1, 0});
    RetrievalGroundTruth gt2({1, 1, 1}, 2);
    CHECK(mean_recall(s2, gt2) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("mean_recall is rank-invariant under increasing transforms") {
    Rng rng(11);
    const std::size_t n_q = 8, n_g = 15;
    std::vector<double> scores(n_q * n_g);
    std::vector<std::size_t> targets(n_q);
    for (double& v : scores) v = rng.uniform();
    for (auto& t : targets) t = rng.uniform_index(n_g);
    SimilarityMatrix s(make_ids("q", n_q), make_ids("g", n_g), scores);
    RetrievalGroundTruth gt(targets, n_g);

    std::vector<double> transformed(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        transformed[i] = std::exp(3.0 * scores[i]) + 2.0;
    }
    SimilarityMatrix st(make_ids("q", n_q), make_ids("g", n_g), std::move(transformed));
    CHECK(mean_recall(s, gt) == doctest::Approx(mean_recall(st, gt)).epsilon(1e-12));
}

TEST_CASE("mean_recall_parallel matches sequential") {
    Rng rng(13);
    const std::size_t n_q = 50, n_g = 30;
    std::vector<double> scores(n_q * n_g);
    std::vector<std::size_t> targets(n_q);
    for (double& v : scores) v = rng.uniform();
    for (auto& t : targets) t = rng.uniform_index(n_g);
    SimilarityMatrix s(make_ids("q", n_q), make_ids("g", n_g), std::move(scores));
    RetrievalGroundTruth gt(std::move(targets), n_g);
    CHECK(mean_recall_parallel(s, gt, 4) == mean_recall(s, gt));
}

TEST_CASE("accuracy") {
    QaLabels labels({0, 1, 2}, 3);
    CHECK(accuracy({0, 1, 2}, labels) == doctest::Approx(1.0));
    CHECK(accuracy({0, 0, 0}, labels) == doctest::Approx(1.0 / 3.0));
    CHECK(accuracy({1, 1}, QaLabels({0, 0}, 2)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(accuracy({0, 1}, labels), ArgumentError);
}

TEST_CASE("accuracy of binary complement sums to 1") {
    Rng rng(5);
    std::vector<std::size_t> labels_raw(40), predicted(40), flipped(40);
    for (std::size_t i = 0; i < 40; ++i) {
        labels_raw[i] = rng.uniform_index(2);
        predicted[i] = rng.uniform_index(2);
        flipped[i] = 1 - predicted[i];
    }
    QaLabels labels(labels_raw, 2);
    CHECK(accuracy(predicted, labels) + accuracy(flipped, labels) == doctest::Approx(1.0));
}

TEST_CASE("meta_average") {
    CHECK(meta_average({35.02, 73.01, 85.95}) == doctest::Approx(64.66).epsilon(1e-9));
    CHECK(meta_average({42.5}) == doctest::Approx(42.5));
    CHECK(meta_average({0.0, 100.0}) == doctest::Approx(50.0));
    CHECK_THROWS_AS(meta_average({}), ArgumentError);
}
