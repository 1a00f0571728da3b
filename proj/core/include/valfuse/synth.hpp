// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "valfuse/consensus.hpp"
#include "valfuse/retrieval.hpp"
#include "valfuse/types.hpp"

namespace valfuse::synth {

/// Seeded synthetic-problem generator settings. qualities has one entry per
/// model: the approximate fraction of queries/examples where that model puts
/// the true item strictly on top. When complementary is set, model i is only
/// given its quality on the i-th (round-robin) slice of queries and emits
/// pure noise elsewhere.
struct SynthConfig {
    std::uint64_t seed = 0;
    std::size_t n_queries = 1;
    std::size_t n_gallery = 1;
    std::size_t n_answers = 4;   // QA only
    std::size_t n_captions = 3;  // captioning only
    std::vector<double> qualities = {1.0};
    double noise_scale = 0.5;
    bool complementary = false;

    std::size_t n_models() const { return qualities.size(); }
    void validate() const;
};

/// Retrieval problem with ground truth. Scores are quantized to float32 so
/// that binary round-trips are exact. Deterministic given seed.
FusionProblem gen_retrieval_problem(const SynthConfig& config);

/// Exhaustive simplex-lattice search oracle for the weight optimizer.
/// step must divide 1 evenly; guarded to N_r <= 4.
std::pair<EnsembleWeights, double> grid_search_weights(const FusionProblem& problem, double step);

/// Literal repeated-full-scan restatement of greedy NMS, used as the
/// differential-test oracle for nms_moments.
std::vector<MomentCandidate> reference_nms(const std::vector<MomentCandidate>& cands,
                                           double iou_threshold, std::size_t max_keep);

/// Random moment candidates for the NMS differential test.
std::vector<MomentCandidate> gen_moments(std::uint64_t seed, std::size_t count,
                                         std::size_t n_videos);

std::pair<QaScoreTensor, QaLabels> gen_qa_problem(const SynthConfig& config);

/// Each set carries a designated reference caption duplicated across
/// ceil(quality * N_c) models; the rest emit distinct distractors.
/// qualities[0] is used as the duplication quality.
std::vector<CaptionSet> gen_caption_sets(const SynthConfig& config, std::size_t n_sets);

}  // namespace valfuse::synth
