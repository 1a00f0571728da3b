// SPDX-License-Identifier: Apache-2.0
#include "valfuse/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "valfuse/errors.hpp"
#include "valfuse/metrics.hpp"

namespace valfuse {

void MomentCandidate::validate() const {
    if (!(t_start >= 0.0)) throw ArgumentError("moment t_start must be >= 0");
    if (!(t_end > t_start)) throw ArgumentError("moment t_end must be > t_start");
    if (!std::isfinite(score)) throw ArgumentError("moment score must be finite");
}

void FusionProblem::validate() const {
    if (matrices.empty()) throw ArgumentError("fusion problem needs at least one matrix");
    const auto& first = matrices.front();
    for (const auto& m : matrices) {
        if (m.query_ids() != first.query_ids() || m.gallery_ids() != first.gallery_ids()) {
            throw ArgumentError("fusion problem matrices are not id-aligned");
        }
    }
    if (gt.n_queries() != first.n_queries() || gt.n_gallery() != first.n_gallery()) {
        throw ArgumentError("fusion problem ground truth does not match matrix shape");
    }
}

SimilarityMatrix fuse_matrices(const std::vector<SimilarityMatrix>& matrices,
                               const EnsembleWeights& w) {
    if (matrices.empty()) throw ArgumentError("fuse_matrices: no matrices given");
    if (w.size() != matrices.size()) {
        throw ArgumentError("fuse_matrices: weight count does not match matrix count");
    }
    const auto& first = matrices.front();
    for (const auto& m : matrices) {
        if (m.query_ids() != first.query_ids() || m.gallery_ids() != first.gallery_ids()) {
            throw ArgumentError("fuse_matrices: matrices are not id-aligned");
        }
    }
    std::vector<double> fused(first.scores().size(), 0.0);
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        const auto& src = matrices[i].scores();
        const double wi = w[i];
        for (std::size_t j = 0; j < fused.size(); ++j) fused[j] += wi * src[j];
    }
    return SimilarityMatrix(first.query_ids(), first.gallery_ids(), std::move(fused));
}

double temporal_iou(const MomentCandidate& a, const MomentCandidate& b) {
    if (a.video_id != b.video_id) return 0.0;
    const double inter = std::min(a.t_end, b.t_end) - std::max(a.t_start, b.t_start);
    if (inter <= 0.0) return 0.0;
    const double uni = std::max(a.t_end, b.t_end) - std::min(a.t_start, b.t_start);
    return inter / uni;
}

std::vector<MomentCandidate> nms_moments(const std::vector<MomentCandidate>& cands,
                                         double iou_threshold, std::size_t max_keep) {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw ArgumentError("nms_moments: iou_threshold must be in (0,1]");
    }
    if (max_keep == 0) throw ArgumentError("nms_moments: max_keep must be positive");
    for (const auto& c : cands) c.validate();

    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (cands[i].score != cands[j].score) return cands[i].score > cands[j].score;
        return cands[i].t_start < cands[j].t_start;
    });

    std::vector<bool> suppressed(cands.size(), false);
    std::vector<MomentCandidate> kept;
    for (std::size_t r = 0; r < order.size() && kept.size() < max_keep; ++r) {
        const std::size_t i = order[r];
        if (suppressed[i]) continue;
        kept.push_back(cands[i]);
        for (std::size_t s = r + 1; s < order.size(); ++s) {
            const std::size_t j = order[s];
            if (!suppressed[j] && temporal_iou(cands[i], cands[j]) >= iou_threshold) {
                suppressed[j] = true;
            }
        }
    }
    return kept;
}

double evaluate_weights(const FusionProblem& problem, const EnsembleWeights& w,
                        unsigned threads) {
    problem.validate();
    return mean_recall_parallel(fuse_matrices(problem.matrices, w), problem.gt, threads);
}

RetrievalOptimizationResult optimize_retrieval_weights(const FusionProblem& problem,
                                                       std::size_t steps, std::uint64_t seed,
                                                       const TpeConfig& config,
                                                       unsigned threads) {
    problem.validate();
    if (steps == 0) throw ArgumentError("optimize_retrieval_weights: steps must be positive");
    const std::size_t n_r = problem.n_models();

    auto objective = [&](const std::vector<double>& point) {
        return evaluate_weights(problem, normalize_to_simplex(point), threads);
    };

    // Evaluate the single-model corners first so the best observed trial is
    // never worse than any individual model.
    std::vector<std::vector<double>> corners;
    for (std::size_t i = 0; i < n_r && i < steps; ++i) {
        std::vector<double> corner(n_r, 0.0);
        corner[i] = 1.0;
        corners.push_back(std::move(corner));
    }

    TpeResult tpe = tpe_maximize(objective, n_r, steps, seed, config, corners);
    return RetrievalOptimizationResult{normalize_to_simplex(tpe.best_point),
                                       tpe.best_objective, std::move(tpe.history)};
}

}  // namespace valfuse
