// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "config.hpp"
#include "random_stream.hpp"

namespace isacop {

using CVector = Eigen::VectorXcd;

//! One draw of the user channel h (i.i.d. CN(0,1)) and the target angle.
struct ChannelRealization {
    CVector h;
    double theta = 0.0;
};

//! Unit-norm transmit beamformer.
struct Beamformer {
    CVector w;
};

//! cos(theta) evaluated as sin(pi/2 - theta); exactly zero at theta = pi/2.
double cos_angle(double theta);

//! Per-antenna phase f_i = pi sin(theta) (count - (2i - 1)) / 2, i = 1..count.
double steering_phase(double theta, int count, int index);

ChannelRealization sample_channel(const SystemConfig& config, RandomStream& rng);

//! a_i = exp(-j f_i); unit-magnitude entries, squared norm equals `count`.
CVector steering_vector(double theta, int count);

//! Elementwise d/dtheta of steering_vector.
CVector steering_derivative(double theta, int count);

//! Closed form of |d a / d theta|^2 = pi^2 cos^2(theta) count (count^2 - 1) / 12.
double steering_derivative_norm2(double theta, int count);

/// w = (b1 h + b2 a) / |b1 h + b2 a|. Throws DegenerateBeamformer when the
/// unnormalized norm is below 1e-12.
Beamformer beamformer(const SystemConfig& config, const ChannelRealization& chan);

//! User SINR (p_t / sigma_u^2) |h^H w|^2.
double sinr(const SystemConfig& config, const ChannelRealization& chan);

/*!
 * CRB of the target angle from the trace form with A = b a^H and
 * R_x = p_t w w^H.
 *
 * Throws SingularFisher when the Fisher determinant is below 1e-300 or when
 * it is lost to cancellation (below 64 machine epsilons of its leading term).
 */
double crb_general(const SystemConfig& config, const ChannelRealization& chan);

/*!
 * CRB of the target angle, sigma_r^2 / (2 L p_t |alpha|^2 |b'|^2 |a^H w|^2).
 *
 * Throws SingularFisher when the denominator is below 1e-300.
 */
double crb_simplified(const SystemConfig& config, const ChannelRealization& chan);

//! g(theta) = 6 sigma_r^2 / (L p_t |alpha|^2 (M-1) M (M+1) pi^2 cos^2 theta).
double crb_scale(const SystemConfig& config, double theta);

}  // namespace isacop
