// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "valfuse/tpe.hpp"
#include "valfuse/types.hpp"

namespace valfuse {

/// A scored temporal segment for video corpus moment retrieval.
struct MomentCandidate {
    std::string video_id;
    double t_start = 0.0;  // seconds
    double t_end = 0.0;    // seconds, > t_start
    double score = 0.0;

    void validate() const;
};

/// N_r id-aligned similarity matrices plus the ground truth they are
/// evaluated against.
struct FusionProblem {
    std::vector<SimilarityMatrix> matrices;
    RetrievalGroundTruth gt;

    std::size_t n_models() const { return matrices.size(); }
    void validate() const;
};

/// Elementwise weighted sum of id-aligned similarity matrices.
SimilarityMatrix fuse_matrices(const std::vector<SimilarityMatrix>& matrices,
                               const EnsembleWeights& w);

/// Interval intersection-over-union; zero across different videos.
double temporal_iou(const MomentCandidate& a, const MomentCandidate& b);

/// Greedy NMS: repeatedly keep the best remaining candidate (ties by earlier
/// t_start, then input order) and suppress everything with IoU >= threshold
/// against it, up to max_keep selections. Output in selection order.
std::vector<MomentCandidate> nms_moments(const std::vector<MomentCandidate>& cands,
                                         double iou_threshold, std::size_t max_keep);

/// mean_recall of the fused matrix under the given weights.
double evaluate_weights(const FusionProblem& problem, const EnsembleWeights& w,
                        unsigned threads = 1);

struct RetrievalOptimizationResult {
    EnsembleWeights weights;
    double objective = 0.0;
    TrialHistory history;
};

/// TPE search over [0,1]^{N_r}, normalizing each point to the simplex before
/// evaluation. The pure single-model corner points are evaluated first (they
/// count against the step budget), so the result is never worse than the
/// best single model. Deterministic given seed.
RetrievalOptimizationResult optimize_retrieval_weights(const FusionProblem& problem,
                                                       std::size_t steps, std::uint64_t seed,
                                                       const TpeConfig& config = {},
                                                       unsigned threads = 1);

}  // namespace valfuse
