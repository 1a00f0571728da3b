// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "valfuse/rng.hpp"

namespace valfuse {

/// Tree-structured Parzen Estimator over the unit hypercube [0,1]^d,
/// maximization orientation. The numeric defaults are conventional
/// sequential model-based optimization settings, pinned here so runs
/// are reproducible.
struct TpeConfig {
    double gamma = 0.25;          // quantile that defines the "good" split
    std::size_t n_startup = 20;   // uniform random trials before modeling
    std::size_t n_candidates = 24;
    double bandwidth_floor = 0.01;
    double bandwidth_ceiling = 1.0;

    void validate() const;
};

struct Trial {
    std::vector<double> point;  // in [0,1]^d
    double objective = 0.0;
};

using TrialHistory = std::vector<Trial>;

/// Partition history into the ceil(gamma * n) best trials ("good") and the
/// rest ("bad"). Ties keep earlier trials first; good is never empty.
std::pair<TrialHistory, TrialHistory> split_history(const TrialHistory& history, double gamma);

/// Kernel widths for a sorted coordinate list: each point's bandwidth is the
/// larger of its neighbor gaps, with virtual neighbors at 0 and 1, clipped
/// to [floor, ceiling].
std::vector<double> adaptive_bandwidths(const std::vector<double>& sorted_coords,
                                        double floor, double ceiling);

/// Equal-weight mixture of Gaussian kernels, each truncated and renormalized
/// to [0,1]. Empty coords means the uniform density 1.
double parzen_density(const std::vector<double>& coords, const std::vector<double>& bandwidths,
                      double x);

/// Propose the next point: uniform during startup, otherwise the candidate
/// (drawn from the good-density) maximizing the good/bad density ratio.
std::vector<double> tpe_suggest(const TrialHistory& history, std::size_t dim,
                                const TpeConfig& config, Rng& rng);

struct TpeResult {
    std::vector<double> best_point;
    double best_objective = 0.0;
    TrialHistory history;
};

/// Run the suggest/evaluate loop for `steps` iterations and return the best
/// observed trial. `initial_points`, if given, are evaluated first and count
/// against the step budget (so do startup trials). Deterministic given seed.
TpeResult tpe_maximize(const std::function<double(const std::vector<double>&)>& objective,
                       std::size_t dim, std::size_t steps, std::uint64_t seed,
                       const TpeConfig& config = {},
                       const std::vector<std::vector<double>>& initial_points = {});

}  // namespace valfuse
