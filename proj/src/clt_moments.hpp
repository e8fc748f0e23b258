// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "config.hpp"
#include "core_model.hpp"

namespace isacop {

//! Mean vector and covariance of a three-dimensional Gaussian.
struct TrivariateGaussian {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();

    TrivariateGaussian scaled(double count) const { return {count * mean, count * cov}; }
};

//! One realization of (x_i, y_i, k_i) or (x~_i, y~_i, k_i).
struct SampleTriple {
    double first = 0.0;
    double second = 0.0;
    double third = 0.0;
};

enum class TripleKind { User, Target };

/// (x, y, k) for one antenna from the real expansions in (m, n, |b1|, |b2|,
/// phi1, phi2, f), where x + jy = b1 |h|^2 + b2 h^* e^{-jf} and
/// k = |b1 h + b2 e^{-jf}|^2.
SampleTriple sample_triple_user(cdouble h, double f, const SystemConfig& config);

//! (x~, y~, k) for one antenna, with x~ + j y~ = b1 e^{jf} h.
SampleTriple sample_triple_target(cdouble h, double f, const SystemConfig& config);

/// Per-antenna mean and covariance of d_i = (x_i, y_i, k_i). Independent of
/// theta and phi2.
TrivariateGaussian per_antenna_moments_user(const SystemConfig& config);

/// Per-antenna mean and covariance of (x~_i, y~_i, k_i). Independent of theta
/// and phi1.
TrivariateGaussian per_antenna_moments_target(const SystemConfig& config);

//! CLT law of the sums (X, Y, K): N times the per-antenna moments.
TrivariateGaussian moments_user(const SystemConfig& config);
TrivariateGaussian moments_target(const SystemConfig& config);

/*!
 * Moments of the sums conditional on theta, accumulated antenna by antenna
 * from the expansion coefficients with every f_i kept explicit. Agrees with
 * moments_user / moments_target up to roundoff; used to check the
 * theta-independence numerically instead of assuming it.
 */
TrivariateGaussian conditional_moments_user(const SystemConfig& config, double theta);
TrivariateGaussian conditional_moments_target(const SystemConfig& config, double theta);

//! (X, Y, K) sums for a channel draw.
Eigen::Vector3d user_sums(const SystemConfig& config, const ChannelRealization& chan);
//! (X~, Y~, K) sums for a channel draw.
Eigen::Vector3d target_sums(const SystemConfig& config, const ChannelRealization& chan);

//! SINR as (p_t / sigma_u^2) (X^2 + Y^2) / K.
double sinr_from_sums(const SystemConfig& config, const Eigen::Vector3d& sums);

//! CRB as g(theta) K / |X~ + jY~ + N b2|^2.
double crb_from_sums(const SystemConfig& config, double theta, const Eigen::Vector3d& sums);

/// `count` i.i.d. per-antenna triples: draw k uses substream (seed, k), an
/// independent CN(0,1) coefficient, theta ~ U[0, pi] and antenna index
/// (k mod N) + 1.
std::vector<SampleTriple> draw_triples(const SystemConfig& config,
                                       TripleKind kind,
                                       std::uint64_t count,
                                       std::uint64_t seed,
                                       unsigned threads = 0);

//---------------------------------------------------------------------------//
// Moment matching
//---------------------------------------------------------------------------//

struct MomentEntry {
    const char* name;
    double empirical;
    double expected;
    double std_error;  // delete-one-block jackknife
    double z() const { return std_error > 0 ? (empirical - expected) / std_error : (empirical == expected ? 0.0 : 1e300); }
};

struct MomentMatch {
    std::vector<MomentEntry> entries;  // 3 means then 6 covariance entries
    double max_abs_z() const;
};

/*!
 * Compares sample mean and covariance of `samples` entrywise against
 * `reference`, with standard errors from a delete-one-block jackknife over
 * `blocks` contiguous blocks.
 */
MomentMatch moment_match(std::span<const SampleTriple> samples,
                         const TrivariateGaussian& reference,
                         int blocks = 100);

}  // namespace isacop
