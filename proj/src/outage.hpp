// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "config.hpp"
#include "quadform.hpp"

namespace isacop {

inline constexpr std::uint64_t kDefaultSeed = 20240607;

struct OutageQuery {
    SystemConfig config;
    double gamma = 8.0;      // SINR threshold, linear
    double epsilon = 8e-7;   // CRB threshold
    std::uint64_t trials = 100000;
    std::uint64_t seed = kDefaultSeed;
    int theta_nodes = 64;    // total over both half-intervals
    unsigned threads = 0;    // 0: all hardware threads
    std::optional<double> fixed_theta;  // Monte Carlo only; overrides theta ~ U[0, pi]

    void validate() const;
};

enum class Method { Analytic, MonteCarlo };

const char* method_name(Method method);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    Method method = Method::Analytic;
};

//! {u : u1^2 + u2^2 - (gamma sigma_u^2 / p_t) u3 < 0} over u = (X, Y, K).
QuadraticDomain user_domain(const SystemConfig& config, double gamma);

/// CRB > epsilon at angle theta, as
/// epsilon |X~ + jY~ + N b2|^2 - g(theta) K < 0 over u = (X~, Y~, K).
QuadraticDomain target_domain(const SystemConfig& config, double epsilon, double theta);

//! P(SINR < gamma) from the CLT law of (X, Y, K).
Estimate user_op_analytic(const OutageQuery& query);

/// Same probability averaged over Gauss-Legendre nodes in theta, with the
/// moments of (X, Y, K) conditioned on each node.
Estimate user_op_analytic_theta_averaged(const OutageQuery& query);

//! Fraction of exact-SINR draws below gamma.
Estimate user_op_montecarlo(const OutageQuery& query);

/*!
 * P(CRB > epsilon) from the CLT law of (X~, Y~, K), averaged over theta.
 *
 * Given theta the outage event is {K > 0, eps D / K < g(theta)}, so the
 * conditional probability rises monotonically towards theta = pi/2, where
 * g(theta) diverges, and under the Gaussian law it does so over a narrow
 * band of angles. Each half-interval [0, pi/2], [pi/2, pi] is split by
 * bisection where the conditional probability reaches 1e-10, 1e-3, 0.5,
 * 1 - 1e-3 and 1 - 1e-10 of its limit P(K > 0), and every panel gets
 * theta_nodes / 2 Gauss-Legendre nodes. The rule is re-run with twice the
 * nodes per panel; a change above 1e-4 throws QuadratureNotConverged.
 * Returns the refined value.
 */
Estimate target_op_analytic(const OutageQuery& query);

//! Fraction of exact-CRB draws above epsilon; singular draws count as outages.
Estimate target_op_montecarlo(const OutageQuery& query);

//! Monte Carlo mean of log2(1 + SINR), bits per channel use.
Estimate ergodic_rate_montecarlo(const OutageQuery& query);

//! Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int count);

}  // namespace isacop
