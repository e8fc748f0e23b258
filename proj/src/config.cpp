// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "errors.hpp"

namespace isacop {

namespace {

std::string_view trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    auto const last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

void require(bool ok, std::string key, const std::string& what)
{
    if (!ok)
        throw ConfigError(std::move(key), what);
}

}  // namespace

double parse_double(std::string_view key, std::string_view value)
{
    auto v = trim(value);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(std::string(key), fmt::format("expected a finite number, got '{}'", v));
    return out;
}

long long parse_integer(std::string_view key, std::string_view value)
{
    auto v = trim(value);
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(std::string(key), fmt::format("expected an integer, got '{}'", v));
    return out;
}

// Accepts "re" or "(re,im)".
cdouble parse_complex(std::string_view key, std::string_view value)
{
    auto v = trim(value);
    if (!v.empty() && v.front() == '(') {
        if (v.back() != ')')
            throw ConfigError(std::string(key), fmt::format("malformed complex value '{}'", v));
        auto inner = v.substr(1, v.size() - 2);
        auto comma = inner.find(',');
        if (comma == std::string_view::npos)
            throw ConfigError(std::string(key), fmt::format("malformed complex value '{}'", v));
        return {parse_double(key, inner.substr(0, comma)), parse_double(key, inner.substr(comma + 1))};
    }
    return {parse_double(key, v), 0.0};
}

void SystemConfig::validate() const
{
    require(n_tx >= 2, "N", fmt::format("must be >= 2 (got {})", n_tx));
    require(n_rx >= 2, "M", fmt::format("must be >= 2 (got {})", n_rx));
    require(p_t > 0.0, "p_t", "must be > 0");
    require(sigma_u2 > 0.0, "sigma_u2", "must be > 0");
    require(sigma_r2 > 0.0, "sigma_r2", "must be > 0");
    require(frame_length > n_tx, "L", fmt::format("must exceed N (got L={}, N={})", frame_length, n_tx));
    require(std::abs(alpha) > 0.0, "alpha", "must be nonzero");
    require(b1_mag >= 0.0, "b1_mag", "must be >= 0");
    require(b2_mag >= 0.0, "b2_mag", "must be >= 0");
    require(b1_mag + b2_mag > 0.0, "b1_mag", "b1_mag and b2_mag cannot both be zero");
}

bool set_config_value(SystemConfig& config, std::string_view key, std::string_view value)
{
    if (key == "N")
        config.n_tx = static_cast<int>(parse_integer(key, value));
    else if (key == "M")
        config.n_rx = static_cast<int>(parse_integer(key, value));
    else if (key == "p_t")
        config.p_t = parse_double(key, value);
    else if (key == "sigma_u2")
        config.sigma_u2 = parse_double(key, value);
    else if (key == "sigma_r2")
        config.sigma_r2 = parse_double(key, value);
    else if (key == "L")
        config.frame_length = static_cast<int>(parse_integer(key, value));
    else if (key == "alpha")
        config.alpha = parse_complex(key, value);
    else if (key == "b1_mag")
        config.b1_mag = parse_double(key, value);
    else if (key == "b1_phase")
        config.b1_phase = parse_double(key, value);
    else if (key == "b2_mag")
        config.b2_mag = parse_double(key, value);
    else if (key == "b2_phase")
        config.b2_phase = parse_double(key, value);
    else
        return false;
    return true;
}

std::vector<std::string> describe(const SystemConfig& c)
{
    return {
        fmt::format("N={}", c.n_tx),
        fmt::format("M={}", c.n_rx),
        fmt::format("p_t={}", c.p_t),
        fmt::format("sigma_u2={}", c.sigma_u2),
        fmt::format("sigma_r2={}", c.sigma_r2),
        fmt::format("L={}", c.frame_length),
        fmt::format("alpha=({},{})", c.alpha.real(), c.alpha.imag()),
        fmt::format("b1_mag={}", c.b1_mag),
        fmt::format("b1_phase={}", c.b1_phase),
        fmt::format("b2_mag={}", c.b2_mag),
        fmt::format("b2_phase={}", c.b2_phase),
    };
}

}  // namespace isacop
