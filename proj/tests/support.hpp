// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
//
// Hand-rolled generators and independent reference computations shared by
// the test binaries. Nothing here calls into the library's own random
// streams or moment code, so it can serve as an oracle for them.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "config.hpp"
#include "core_model.hpp"
#include "quadform.hpp"

namespace isacop::testing {

inline constexpr double pi = std::numbers::pi;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    double normal(double sd = 1.0) { return sd * norm_(eng_); }
    cdouble cnormal() { return {normal(std::sqrt(0.5)), normal(std::sqrt(0.5))}; }
    std::mt19937_64& engine() { return eng_; }

    CVector channel(int n)
    {
        CVector h(n);
        for (int i = 0; i < n; ++i)
            h(i) = cnormal();
        return h;
    }

    //! Valid link configuration with every parameter randomized.
    SystemConfig config()
    {
        SystemConfig c;
        c.n_tx = integer(2, 24);
        c.n_rx = integer(2, 32);
        c.p_t = std::exp(uniform(-2.0, 4.0));
        c.sigma_u2 = std::exp(uniform(-2.0, 2.0));
        c.sigma_r2 = std::exp(uniform(-2.0, 2.0));
        c.frame_length = c.n_tx + integer(1, 100);
        c.alpha = std::polar(std::exp(uniform(-1.0, 1.0)), uniform(-pi, pi));
        c.b1_mag = uniform(0.05, 1.0);
        c.b1_phase = uniform(-pi, pi);
        c.b2_mag = uniform(0.05, 1.0);
        c.b2_phase = uniform(-pi, pi);
        return c;
    }

    //! Angle in [0, pi] with |cos theta| > margin.
    double theta_away_from_broadside(double margin)
    {
        while (true) {
            double const t = uniform(0.0, pi);
            if (std::abs(std::cos(t)) > margin)
                return t;
        }
    }

    //! Random mean and covariance A A^T + jitter.
    TrivariateGaussian gaussian()
    {
        TrivariateGaussian g;
        Eigen::Matrix3d a;
        for (int i = 0; i < 3; ++i) {
            g.mean(i) = normal(2.0);
            for (int j = 0; j < 3; ++j)
                a(i, j) = normal();
        }
        g.cov = a * a.transpose() + 0.05 * Eigen::Matrix3d::Identity();
        return g;
    }

    QuadraticDomain domain()
    {
        QuadraticDomain d;
        Eigen::Matrix3d b;
        for (int i = 0; i < 3; ++i) {
            d.q1(i) = normal();
            for (int j = 0; j < 3; ++j)
                b(i, j) = normal();
        }
        d.q2 = 0.5 * (b + b.transpose());
        d.c = normal(3.0);
        return d;
    }

    //! Parameters with 1-3 terms of mixed sign, dof 1-2, moderate noncentrality.
    GChi2Params gchi2()
    {
        GChi2Params p;
        int const terms = integer(1, 3);
        for (int i = 0; i < terms; ++i) {
            double w = uniform(0.2, 2.0);
            if (integer(0, 2) == 0)
                w = -w;
            p.weights.push_back(w);
            p.dofs.push_back(integer(1, 2));
            p.noncentralities.push_back(integer(0, 1) ? uniform(0.0, 3.0) : 0.0);
        }
        p.lin_coeff = integer(0, 1) ? uniform(0.0, 1.0) : 0.0;
        p.offset = uniform(-2.0, 2.0);
        return p;
    }

    //! One draw of sum w_i chi'^2(k_i, nc_i) + s Z + m straight from the definition.
    double gchi2_draw(const GChi2Params& p)
    {
        double g = p.offset + p.lin_coeff * normal();
        for (std::size_t i = 0; i < p.weights.size(); ++i) {
            double chi = 0.0;
            for (int k = 0; k < p.dofs[i]; ++k) {
                double const z = normal() + (k == 0 ? std::sqrt(p.noncentralities[i]) : 0.0);
                chi += z * z;
            }
            g += p.weights[i] * chi;
        }
        return g;
    }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> norm_{0.0, 1.0};
};

//---------------------------------------------------------------------------//
// Reference formulas
//---------------------------------------------------------------------------//

//! Per-antenna mean and covariance of (x, y, k), written out entry by entry.
inline TrivariateGaussian user_moments_reference(const SystemConfig& c)
{
    double const b1 = c.b1_mag, b2 = c.b2_mag, p1 = c.b1_phase;
    double const s = b1 * b1 + b2 * b2;
    TrivariateGaussian g;
    g.mean << b1 * std::cos(p1), b1 * std::sin(p1), s;
    g.cov(0, 0) = b2 * b2 / 2 + b1 * b1 * std::cos(p1) * std::cos(p1);
    g.cov(0, 1) = b1 * b1 * std::cos(p1) * std::sin(p1);
    g.cov(0, 2) = b1 * s * std::cos(p1);
    g.cov(1, 1) = b2 * b2 / 2 + b1 * b1 * std::sin(p1) * std::sin(p1);
    g.cov(1, 2) = b1 * s * std::sin(p1);
    g.cov(2, 2) = b1 * b1 * b1 * b1 + 2 * b1 * b1 * b2 * b2;
    g.cov(1, 0) = g.cov(0, 1);
    g.cov(2, 0) = g.cov(0, 2);
    g.cov(2, 1) = g.cov(1, 2);
    return g;
}

//! Per-antenna mean and covariance of (x~, y~, k).
inline TrivariateGaussian target_moments_reference(const SystemConfig& c)
{
    double const b1 = c.b1_mag, b2 = c.b2_mag, p2 = c.b2_phase;
    TrivariateGaussian g;
    g.mean << 0.0, 0.0, b1 * b1 + b2 * b2;
    g.cov(0, 0) = g.cov(1, 1) = b1 * b1 / 2;
    g.cov(0, 2) = g.cov(2, 0) = b1 * b1 * b2 * std::cos(p2);
    g.cov(1, 2) = g.cov(2, 1) = b1 * b1 * b2 * std::sin(p2);
    g.cov(2, 2) = b1 * b1 * b1 * b1 + 2 * b1 * b1 * b2 * b2;
    return g;
}

//! Steering vector element by element from the phase definition.
inline CVector steering_reference(double theta, int count)
{
    CVector a(count);
    for (int i = 1; i <= count; ++i)
        a(i - 1) = std::exp(cdouble(0.0, -pi * std::sin(theta) * (count - (2.0 * i - 1.0)) / 2.0));
    return a;
}

//! Sum of squared half-integer offsets, times pi^2 cos^2.
inline double steering_derivative_norm2_by_loop(double theta, int count)
{
    double sum = 0.0;
    for (int i = 1; i <= count; ++i) {
        double const r = (count - (2.0 * i - 1.0)) / 2.0;
        sum += r * r;
    }
    return pi * pi * std::cos(theta) * std::cos(theta) * sum;
}

//! SINR straight from its definition, with the beamformer built in the test.
inline double sinr_reference(const SystemConfig& c, const CVector& h, double theta)
{
    CVector const v = c.b1() * h + c.b2() * steering_reference(theta, c.n_tx);
    return c.p_t / c.sigma_u2 * std::norm(h.dot(v)) / v.squaredNorm();
}

inline double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace isacop::testing
