// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace isacop {

using cdouble = std::complex<double>;

/// Scalar parameters of the downlink ISAC link. Defaults are the reference
/// scenario: 15 transmit / 17 receive antennas, p_t = 10, unit noise
/// variances, L = 30, alpha = 1, |b1| = 0.2, |b2| = 0.8, phi1 = pi/3, phi2 = 0.
struct SystemConfig {
    int n_tx = 15;           // N, transmit antennas
    int n_rx = 17;           // M, receive antennas
    double p_t = 10.0;       // transmit power, linear
    double sigma_u2 = 1.0;   // user noise variance
    double sigma_r2 = 1.0;   // radar noise variance
    int frame_length = 30;   // L
    cdouble alpha{1.0, 0.0}; // reflection coefficient
    double b1_mag = 0.2;
    double b1_phase = std::numbers::pi / 3.0;
    double b2_mag = 0.8;
    double b2_phase = 0.0;

    cdouble b1() const { return std::polar(b1_mag, b1_phase); }
    cdouble b2() const { return std::polar(b2_mag, b2_phase); }

    /// Throws ConfigError naming the first offending key.
    void validate() const;
};

/// Assigns one `key = value` pair using the external key names
/// (N, M, p_t, sigma_u2, sigma_r2, L, alpha, b1_mag, b1_phase, b2_mag,
/// b2_phase). Returns false if the key is not a SystemConfig key; throws
/// ConfigError if the value does not parse.
bool set_config_value(SystemConfig& config, std::string_view key, std::string_view value);

/// Resolved configuration as ordered `key=value` strings.
std::vector<std::string> describe(const SystemConfig& config);

// Value parsers shared with the experiment layer; throw ConfigError(key, ...).
double parse_double(std::string_view key, std::string_view value);
long long parse_integer(std::string_view key, std::string_view value);
cdouble parse_complex(std::string_view key, std::string_view value);

}  // namespace isacop
