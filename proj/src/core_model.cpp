// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "core_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "errors.hpp"

namespace isacop {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kDegenerateNorm = 1e-12;
constexpr double kSingularFisher = 1e-300;

CVector unnormalized_beam(const SystemConfig& config, const ChannelRealization& chan)
{
    return config.b1() * chan.h + config.b2() * steering_vector(chan.theta, config.n_tx);
}

}  // namespace

double cos_angle(double theta)
{
    return std::sin(pi / 2 - theta);
}

double steering_phase(double theta, int count, int index)
{
    return pi * std::sin(theta) * (count - (2 * index - 1)) / 2.0;
}

ChannelRealization sample_channel(const SystemConfig& config, RandomStream& rng)
{
    ChannelRealization chan;
    chan.h.resize(config.n_tx);
    double const sd = std::sqrt(0.5);
    for (int i = 0; i < config.n_tx; ++i) {
        double const re = rng.normal(sd);
        double const im = rng.normal(sd);
        chan.h[i] = {re, im};
    }
    chan.theta = rng.uniform(0.0, pi);
    return chan;
}

CVector steering_vector(double theta, int count)
{
    CVector a(count);
    for (int i = 1; i <= count; ++i)
        a[i - 1] = std::polar(1.0, -steering_phase(theta, count, i));
    return a;
}

CVector steering_derivative(double theta, int count)
{
    CVector d(count);
    double const c = cos_angle(theta);
    for (int i = 1; i <= count; ++i) {
        double const half_index = (count - (2 * i - 1)) / 2.0;
        d[i - 1] = cdouble(0.0, -pi * c * half_index) * std::polar(1.0, -steering_phase(theta, count, i));
    }
    return d;
}

double steering_derivative_norm2(double theta, int count)
{
    double const c = cos_angle(theta);
    double const m = count;
    return pi * pi * c * c * (m - 1) * m * (m + 1) / 12.0;
}

Beamformer beamformer(const SystemConfig& config, const ChannelRealization& chan)
{
    CVector v = unnormalized_beam(config, chan);
    double const norm = v.norm();
    if (!(norm >= kDegenerateNorm))
        throw Error(ErrorCode::DegenerateBeamformer, "beamformer: |b1 h + b2 a| below 1e-12");
    return Beamformer{v / norm};
}

double sinr(const SystemConfig& config, const ChannelRealization& chan)
{
    auto const bf = beamformer(config, chan);
    return config.p_t / config.sigma_u2 * std::norm(chan.h.dot(bf.w));
}

double crb_general(const SystemConfig& config, const ChannelRealization& chan)
{
    int const n = config.n_tx;
    int const m = config.n_rx;
    auto const bf = beamformer(config, chan);
    CVector const a = steering_vector(chan.theta, n);
    CVector const a_dot = steering_derivative(chan.theta, n);
    CVector const b = steering_vector(chan.theta, m);
    CVector const b_dot = steering_derivative(chan.theta, m);

    Eigen::MatrixXcd const A = b * a.adjoint();
    Eigen::MatrixXcd const A_dot = b_dot * a.adjoint() + b * a_dot.adjoint();
    Eigen::MatrixXcd const Rx = config.p_t * bf.w * bf.w.adjoint();

    cdouble const t_aa = (A.adjoint() * A * Rx).trace();
    cdouble const t_dd = (A_dot.adjoint() * A_dot * Rx).trace();
    cdouble const t_da = (A_dot.adjoint() * A * Rx).trace();

    double const leading = t_aa.real() * t_dd.real();
    double const fisher = leading - std::norm(t_da);
    double const eps = std::numeric_limits<double>::epsilon();
    if (!(fisher >= kSingularFisher) || fisher <= 64 * eps * std::abs(leading))
        throw Error(ErrorCode::SingularFisher, "crb_general: singular Fisher information");
    double const denom = 2.0 * std::norm(config.alpha) * config.frame_length * fisher;
    if (!(denom >= kSingularFisher))
        throw Error(ErrorCode::SingularFisher, "crb_general: singular Fisher information");
    return config.sigma_r2 * t_aa.real() / denom;
}

double crb_simplified(const SystemConfig& config, const ChannelRealization& chan)
{
    auto const bf = beamformer(config, chan);
    CVector const a = steering_vector(chan.theta, config.n_tx);
    double const bdot2 = steering_derivative(chan.theta, config.n_rx).squaredNorm();
    double const gain = std::norm(a.dot(bf.w));
    double const denom = 2.0 * config.frame_length * config.p_t * std::norm(config.alpha) * bdot2 * gain;
    if (!(denom >= kSingularFisher))
        throw Error(ErrorCode::SingularFisher, "crb_simplified: singular Fisher information");
    return config.sigma_r2 / denom;
}

double crb_scale(const SystemConfig& config, double theta)
{
    double const c = cos_angle(theta);
    double const m = config.n_rx;
    return 6.0 * config.sigma_r2
           / (config.frame_length * config.p_t * std::norm(config.alpha) * (m - 1) * m * (m + 1) * pi * pi * c * c);
}

}  // namespace isacop
