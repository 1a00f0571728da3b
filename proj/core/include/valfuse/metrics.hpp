// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "valfuse/types.hpp"

namespace valfuse {

/// 1-based rank of the true item within a score row. Higher score ranks
/// first; ties are broken by smaller index (stable order).
std::size_t rank_of_truth(std::span<const double> row, std::size_t truth_index);

/// Fraction of queries whose true item ranks within the top k.
/// k is clipped to the gallery size.
double recall_at_k(const SimilarityMatrix& s, const RetrievalGroundTruth& gt, std::size_t k);

/// (R@1 + R@5 + R@10) / 3.
double mean_recall(const SimilarityMatrix& s, const RetrievalGroundTruth& gt);

/// Parallel variant used by the CLI; threads <= 1 falls back to the
/// sequential path. Result is identical regardless of thread count.
double mean_recall_parallel(const SimilarityMatrix& s, const RetrievalGroundTruth& gt,
                            unsigned threads);

/// Fraction of positions where predicted answer equals the label.
double accuracy(const std::vector<std::size_t>& predicted, const QaLabels& labels);

/// Unweighted arithmetic mean across macro-task scores.
double meta_average(const std::vector<double>& task_scores);

}  // namespace valfuse
