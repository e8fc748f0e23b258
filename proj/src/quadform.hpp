// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "clt_moments.hpp"

namespace isacop {

//! The sublevel set {u : u^T q2 u + q1^T u + c < 0}.
struct QuadraticDomain {
    Eigen::Matrix3d q2 = Eigen::Matrix3d::Zero();
    Eigen::Vector3d q1 = Eigen::Vector3d::Zero();
    double c = 0.0;

    bool contains(const Eigen::Vector3d& u) const { return u.dot(q2 * u) + q1.dot(u) + c < 0.0; }
};

/*!
 * Generalized chi-square variable
 *   G = sum_i weights[i] * chi'^2(dofs[i], noncentralities[i]) + lin_coeff * Z + offset
 * with Z standard normal and all terms independent.
 */
struct GChi2Params {
    std::vector<double> weights;
    std::vector<int> dofs;
    std::vector<double> noncentralities;
    double lin_coeff = 0.0;
    double offset = 0.0;

    void validate() const;
    double mean() const;
    double variance() const;
};

//! CDF value with the error estimate of the inversion.
struct CdfValue {
    double value = 0.0;
    double error = 0.0;
};

//! Symmetric PSD square root via spectral decomposition; eigenvalues below
//! 1e-12 * trace are treated as zero. Throws NonPSDCovariance on eigenvalues
//! below -1e-12 * trace.
Eigen::Matrix3d psd_sqrt(const Eigen::Matrix3d& cov);

/// Rewrites P(u in domain) for u ~ gauss as P(G < 0) for a generalized
/// chi-square G (whitening, eigen-rotation, completing the square).
GChi2Params reduce_to_gchi2(const QuadraticDomain& domain, const TrivariateGaussian& gauss);

/// P(G <= x) by Gil-Pelaez inversion of the characteristic function.
/// Throws AccuracyNotReached when the error estimate exceeds 1e-6.
double gchi2_cdf(const GChi2Params& params, double x);
CdfValue gchi2_cdf_detailed(const GChi2Params& params, double x);

//! i.i.d. draws of G; block b of 4096 consecutive draws uses substream (seed, b).
std::vector<double> gchi2_sample(const GChi2Params& params,
                                 std::uint64_t trials,
                                 std::uint64_t seed,
                                 unsigned threads = 0);

//! P(u in domain) for u ~ gauss, clamped to [0, 1].
double domain_probability(const QuadraticDomain& domain, const TrivariateGaussian& gauss);

}  // namespace isacop
