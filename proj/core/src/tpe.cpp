// SPDX-License-Identifier: Apache-2.0
#include "valfuse/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "valfuse/errors.hpp"

namespace valfuse {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

// Acklam's rational approximation of the standard normal quantile,
// refined with one Halley step. Accurate to ~1e-15 over (0,1).
double norm_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = norm_cdf(x) - p;
    double u = e / norm_pdf(x);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

// Sample from a Gaussian(center, bw) truncated to [0,1] by inverse CDF.
double sample_truncated(double center, double bw, Rng& rng) {
    const double lo = norm_cdf((0.0 - center) / bw);
    const double hi = norm_cdf((1.0 - center) / bw);
    const double span = hi - lo;
    if (span <= 0.0) return std::clamp(center, 0.0, 1.0);
    double u = lo + rng.uniform() * span;
    u = std::clamp(u, 1e-300, 1.0 - 1e-16);
    const double x = center + bw * norm_quantile(u);
    return std::clamp(x, 0.0, 1.0);
}

struct DimDensity {
    std::vector<double> coords;      // sorted
    std::vector<double> bandwidths;  // aligned with coords
};

DimDensity build_density(const TrialHistory& trials, std::size_t dim_index,
                         const TpeConfig& config) {
    DimDensity d;
    d.coords.reserve(trials.size());
    for (const auto& t : trials) d.coords.push_back(t.point[dim_index]);
    std::sort(d.coords.begin(), d.coords.end());
    d.bandwidths = adaptive_bandwidths(d.coords, config.bandwidth_floor, config.bandwidth_ceiling);
    return d;
}

}  // namespace

void TpeConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("TPE gamma must be in (0,1)");
    if (n_startup == 0) throw ArgumentError("TPE n_startup must be positive");
    if (n_candidates == 0) throw ArgumentError("TPE n_candidates must be positive");
    if (!(bandwidth_floor > 0.0) || bandwidth_floor > bandwidth_ceiling) {
        throw ArgumentError("TPE bandwidth bounds must satisfy 0 < floor <= ceiling");
    }
}

std::pair<TrialHistory, TrialHistory> split_history(const TrialHistory& history, double gamma) {
    if (history.empty()) throw ArgumentError("split_history: empty history");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("split_history: gamma must be in (0,1)");
    const std::size_t n = history.size();
    const std::size_t n_good =
        static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return history[i].objective > history[j].objective;
    });

    TrialHistory good, bad;
    good.reserve(n_good);
    bad.reserve(n - n_good);
    for (std::size_t r = 0; r < n; ++r) {
        (r < n_good ? good : bad).push_back(history[order[r]]);
    }
    return {std::move(good), std::move(bad)};
}

std::vector<double> adaptive_bandwidths(const std::vector<double>& sorted_coords,
                                        double floor, double ceiling) {
    if (sorted_coords.empty()) throw ArgumentError("adaptive_bandwidths: empty coordinate list");
    if (!std::is_sorted(sorted_coords.begin(), sorted_coords.end())) {
        throw ArgumentError("adaptive_bandwidths: coordinates must be sorted ascending");
    }
    const std::size_t n = sorted_coords.size();
    std::vector<double> bw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = (i == 0) ? sorted_coords[i] - 0.0 : sorted_coords[i] - sorted_coords[i - 1];
        const double right = (i + 1 == n) ? 1.0 - sorted_coords[i] : sorted_coords[i + 1] - sorted_coords[i];
        bw[i] = std::clamp(std::max(left, right), floor, ceiling);
    }
    return bw;
}

double parzen_density(const std::vector<double>& coords, const std::vector<double>& bandwidths,
                      double x) {
    if (coords.empty()) return 1.0;  // uniform prior fallback
    if (coords.size() != bandwidths.size()) {
        throw ArgumentError("parzen_density: coords and bandwidths length mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double bw = bandwidths[i];
        if (!(bw > 0.0)) throw ArgumentError("parzen_density: non-positive bandwidth");
        const double z = (x - coords[i]) / bw;
        const double mass = norm_cdf((1.0 - coords[i]) / bw) - norm_cdf((0.0 - coords[i]) / bw);
        sum += norm_pdf(z) / (bw * mass);
    }
    return sum / static_cast<double>(coords.size());
}

std::vector<double> tpe_suggest(const TrialHistory& history, std::size_t dim,
                                const TpeConfig& config, Rng& rng) {
    config.validate();
    if (dim == 0) throw ArgumentError("tpe_suggest: dimension must be positive");

    if (history.size() < config.n_startup) {
        std::vector<double> point(dim);
        for (double& x : point) x = rng.uniform();
        return point;
    }

    auto [good, bad] = split_history(history, config.gamma);
    std::vector<DimDensity> l(dim), g(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        l[d] = build_density(good, d, config);
        g[d] = build_density(bad, d, config);
    }

    std::vector<double> best_point;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < config.n_candidates; ++c) {
        std::vector<double> point(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            const std::size_t j = static_cast<std::size_t>(rng.uniform_index(good.size()));
            // Kernel j in sorted order; the mixture is order-invariant.
            point[d] = sample_truncated(l[d].coords[j], l[d].bandwidths[j], rng);
        }
        double log_ratio = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            log_ratio += std::log(parzen_density(l[d].coords, l[d].bandwidths, point[d]));
            log_ratio -= std::log(parzen_density(g[d].coords, g[d].bandwidths, point[d]));
        }
        if (log_ratio > best_score) {
            best_score = log_ratio;
            best_point = std::move(point);
        }
    }
    return best_point;
}

TpeResult tpe_maximize(const std::function<double(const std::vector<double>&)>& objective,
                       std::size_t dim, std::size_t steps, std::uint64_t seed,
                       const TpeConfig& config,
                       const std::vector<std::vector<double>>& initial_points) {
    config.validate();
    if (dim == 0) throw ArgumentError("tpe_maximize: dimension must be positive");
    if (steps == 0) throw ArgumentError("tpe_maximize: steps must be positive");

    Rng root(seed);
    TpeResult result;
    result.history.reserve(steps);

    auto evaluate = [&](std::vector<double> point) {
        const double value = objective(point);
        if (!std::isfinite(value)) {
            std::ostringstream oss;
            oss << "objective returned a non-finite value at point [";
            for (std::size_t i = 0; i < point.size(); ++i) {
                if (i) oss << ", ";
                oss << point[i];
            }
            oss << "]";
            throw ComputationError(oss.str());
        }
        result.history.push_back(Trial{std::move(point), value});
    };

    for (std::size_t step = 0; step < steps; ++step) {
        Rng iter_rng = root.split();
        if (step < initial_points.size()) {
            const auto& p = initial_points[step];
            if (p.size() != dim) throw ArgumentError("tpe_maximize: initial point dimension mismatch");
            for (double x : p) {
                if (!(x >= 0.0 && x <= 1.0)) {
                    throw ArgumentError("tpe_maximize: initial point outside [0,1]^d");
                }
            }
            evaluate(p);
        } else {
            evaluate(tpe_suggest(result.history, dim, config, iter_rng));
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.history.size(); ++i) {
        if (result.history[i].objective > result.history[best].objective) best = i;
    }
    result.best_point = result.history[best].point;
    result.best_objective = result.history[best].objective;
    return result;
}

}  // namespace valfuse
