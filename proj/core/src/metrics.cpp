// SPDX-License-Identifier: Apache-2.0
#include "valfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "valfuse/errors.hpp"

namespace valfuse {

std::size_t rank_of_truth(std::span<const double> row, std::size_t truth_index) {
    if (truth_index >= row.size()) {
        throw ArgumentError("rank_of_truth: truth index out of range");
    }
    for (double v : row) {
        if (!std::isfinite(v)) throw ArgumentError("rank_of_truth: row contains non-finite score");
    }
    const double truth_score = row[truth_index];
    std::size_t rank = 1;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] > truth_score) ++rank;
        else if (row[i] == truth_score && i < truth_index) ++rank;
    }
    return rank;
}

namespace {

void check_gt(const SimilarityMatrix& s, const RetrievalGroundTruth& gt) {
    if (gt.n_queries() != s.n_queries() || gt.n_gallery() != s.n_gallery()) {
        throw ArgumentError("ground truth does not cover the similarity matrix");
    }
}

}  // namespace

double recall_at_k(const SimilarityMatrix& s, const RetrievalGroundTruth& gt, std::size_t k) {
    if (k == 0) throw ArgumentError("recall_at_k: k must be positive");
    check_gt(s, gt);
    const std::size_t k_eff = std::min(k, s.n_gallery());
    std::size_t hits = 0;
    for (std::size_t q = 0; q < s.n_queries(); ++q) {
        std::span<const double> row(s.row(q), s.n_gallery());
        if (rank_of_truth(row, gt.target(q)) <= k_eff) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(s.n_queries());
}

double mean_recall(const SimilarityMatrix& s, const RetrievalGroundTruth& gt) {
    return (recall_at_k(s, gt, 1) + recall_at_k(s, gt, 5) + recall_at_k(s, gt, 10)) / 3.0;
}

double mean_recall_parallel(const SimilarityMatrix& s, const RetrievalGroundTruth& gt,
                            unsigned threads) {
    if (threads <= 1) return mean_recall(s, gt);
    check_gt(s, gt);
    const std::size_t n_q = s.n_queries();
    std::vector<std::size_t> ranks(n_q);
    std::vector<std::thread> pool;
    const unsigned n_threads = std::min<unsigned>(threads, static_cast<unsigned>(n_q));
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t q = t; q < n_q; q += n_threads) {
                std::span<const double> row(s.row(q), s.n_gallery());
                ranks[q] = rank_of_truth(row, gt.target(q));
            }
        });
    }
    for (auto& th : pool) th.join();

    double sum = 0.0;
    for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{10}}) {
        const std::size_t k_eff = std::min(k, s.n_gallery());
        std::size_t hits = 0;
        for (std::size_t q = 0; q < n_q; ++q) {
            if (ranks[q] <= k_eff) ++hits;
        }
        sum += static_cast<double>(hits) / static_cast<double>(n_q);
    }
    return sum / 3.0;
}

double accuracy(const std::vector<std::size_t>& predicted, const QaLabels& labels) {
    if (predicted.size() != labels.size()) {
        throw ArgumentError("accuracy: prediction and label lengths differ");
    }
    if (predicted.empty()) throw ArgumentError("accuracy: empty inputs");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

double meta_average(const std::vector<double>& task_scores) {
    if (task_scores.empty()) throw ArgumentError("meta_average: empty score list");
    double sum = 0.0;
    for (double v : task_scores) {
        if (!std::isfinite(v)) throw ArgumentError("meta_average: non-finite score");
        sum += v;
    }
    return sum / static_cast<double>(task_scores.size());
}

}  // namespace valfuse
