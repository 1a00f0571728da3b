// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace valfuse {

/// Deterministic, portable PRNG (splitmix64). Used everywhere randomness is
/// needed so that identical seeds give bitwise-identical results on every
/// platform. split() derives an independent stream, e.g. one per optimizer
/// iteration, so interleaving of draws cannot perturb other streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    /// Independent child stream.
    Rng split() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ULL); }

private:
    std::uint64_t state_;
};

}  // namespace valfuse
