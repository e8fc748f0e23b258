// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace isacop {

//---------------------------------------------------------------------------//
/*!
 * Deterministic pseudo-random stream (xoshiro256++ state, SplitMix64 seeding).
 *
 * Monte Carlo trial k of a run draws from substream(seed, k), so results do
 * not depend on how trials are distributed over threads.
 */
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed);

    //! Independent stream for work item `index` of a run seeded with `seed`.
    static RandomStream substream(std::uint64_t seed, std::uint64_t index);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    //! Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal(double stddev = 1.0);

private:
    std::uint64_t s_[4];
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace isacop
