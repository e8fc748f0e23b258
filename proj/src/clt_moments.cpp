// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "clt_moments.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "parallel.hpp"

namespace isacop {

namespace {

constexpr double pi = std::numbers::pi;

/*!
 * A per-antenna quantity written as
 *   u = c0 (m^2 + n^2) + cm m + cn n + c1
 * with m, n i.i.d. N(0, 1/2). Then E[m^2 + n^2] = 1, var(m^2 + n^2) = 1 and
 * the quadratic part is uncorrelated with m and n.
 */
struct Expansion {
    double c0 = 0, cm = 0, cn = 0, c1 = 0;

    double eval(double m, double n) const { return c0 * (m * m + n * n) + cm * m + cn * n + c1; }
    double mean() const { return c0 + c1; }
    static double cov(const Expansion& u, const Expansion& v) { return u.c0 * v.c0 + 0.5 * (u.cm * v.cm + u.cn * v.cn); }
};

std::array<Expansion, 3> user_expansion(const SystemConfig& c, double f)
{
    double const b1 = c.b1_mag, b2 = c.b2_mag, p1 = c.b1_phase, p2 = c.b2_phase;
    Expansion x{b1 * std::cos(p1), b2 * std::cos(p2 - f), b2 * std::sin(p2 - f), 0.0};
    Expansion y{b1 * std::sin(p1), b2 * std::sin(p2 - f), -b2 * std::cos(p2 - f), 0.0};
    Expansion k{b1 * b1, 2 * b1 * b2 * std::cos(-p1 + p2 - f), 2 * b1 * b2 * std::sin(-p1 + p2 - f), b2 * b2};
    return {x, y, k};
}

std::array<Expansion, 3> target_expansion(const SystemConfig& c, double f)
{
    double const b1 = c.b1_mag, p1 = c.b1_phase;
    Expansion xt{0.0, b1 * std::cos(p1 + f), -b1 * std::sin(p1 + f), 0.0};
    Expansion yt{0.0, b1 * std::sin(p1 + f), b1 * std::cos(p1 + f), 0.0};
    return {xt, yt, user_expansion(c, f)[2]};
}

TrivariateGaussian moments_of(const std::array<Expansion, 3>& e)
{
    TrivariateGaussian g;
    for (int r = 0; r < 3; ++r) {
        g.mean[r] = e[r].mean();
        for (int s = 0; s < 3; ++s)
            g.cov(r, s) = Expansion::cov(e[r], e[s]);
    }
    return g;
}

template <class ExpansionFn>
TrivariateGaussian conditional_sum(const SystemConfig& config, double theta, ExpansionFn expansion)
{
    TrivariateGaussian total;
    for (int i = 1; i <= config.n_tx; ++i) {
        auto const g = moments_of(expansion(config, steering_phase(theta, config.n_tx, i)));
        total.mean += g.mean;
        total.cov += g.cov;
    }
    return total;
}

}  // namespace

SampleTriple sample_triple_user(cdouble h, double f, const SystemConfig& config)
{
    auto const e = user_expansion(config, f);
    double const m = h.real(), n = h.imag();
    return {e[0].eval(m, n), e[1].eval(m, n), e[2].eval(m, n)};
}

SampleTriple sample_triple_target(cdouble h, double f, const SystemConfig& config)
{
    auto const e = target_expansion(config, f);
    double const m = h.real(), n = h.imag();
    return {e[0].eval(m, n), e[1].eval(m, n), e[2].eval(m, n)};
}

TrivariateGaussian per_antenna_moments_user(const SystemConfig& c)
{
    double const b1 = c.b1_mag, b2 = c.b2_mag;
    double const cp = std::cos(c.b1_phase), sp = std::sin(c.b1_phase);
    double const power = b1 * b1 + b2 * b2;
    TrivariateGaussian g;
    g.mean << b1 * cp, b1 * sp, power;
    g.cov << b2 * b2 / 2 + b1 * b1 * cp * cp, b1 * b1 * cp * sp, b1 * power * cp,
             b1 * b1 * cp * sp, b2 * b2 / 2 + b1 * b1 * sp * sp, b1 * power * sp,
             b1 * power * cp, b1 * power * sp, b1 * b1 * b1 * b1 + 2 * b1 * b1 * b2 * b2;
    return g;
}

TrivariateGaussian per_antenna_moments_target(const SystemConfig& c)
{
    double const b1 = c.b1_mag, b2 = c.b2_mag;
    double const cq = std::cos(c.b2_phase), sq = std::sin(c.b2_phase);
    TrivariateGaussian g;
    g.mean << 0.0, 0.0, b1 * b1 + b2 * b2;
    g.cov << b1 * b1 / 2, 0.0, b1 * b1 * b2 * cq,
             0.0, b1 * b1 / 2, b1 * b1 * b2 * sq,
             b1 * b1 * b2 * cq, b1 * b1 * b2 * sq, b1 * b1 * b1 * b1 + 2 * b1 * b1 * b2 * b2;
    return g;
}

TrivariateGaussian moments_user(const SystemConfig& config)
{
    return per_antenna_moments_user(config).scaled(config.n_tx);
}

TrivariateGaussian moments_target(const SystemConfig& config)
{
    return per_antenna_moments_target(config).scaled(config.n_tx);
}

TrivariateGaussian conditional_moments_user(const SystemConfig& config, double theta)
{
    return conditional_sum(config, theta, user_expansion);
}

TrivariateGaussian conditional_moments_target(const SystemConfig& config, double theta)
{
    return conditional_sum(config, theta, target_expansion);
}

Eigen::Vector3d user_sums(const SystemConfig& config, const ChannelRealization& chan)
{
    Eigen::Vector3d s = Eigen::Vector3d::Zero();
    for (int i = 1; i <= config.n_tx; ++i) {
        auto const t = sample_triple_user(chan.h[i - 1], steering_phase(chan.theta, config.n_tx, i), config);
        s += Eigen::Vector3d(t.first, t.second, t.third);
    }
    return s;
}

Eigen::Vector3d target_sums(const SystemConfig& config, const ChannelRealization& chan)
{
    Eigen::Vector3d s = Eigen::Vector3d::Zero();
    for (int i = 1; i <= config.n_tx; ++i) {
        auto const t = sample_triple_target(chan.h[i - 1], steering_phase(chan.theta, config.n_tx, i), config);
        s += Eigen::Vector3d(t.first, t.second, t.third);
    }
    return s;
}

double sinr_from_sums(const SystemConfig& config, const Eigen::Vector3d& s)
{
    return config.p_t / config.sigma_u2 * (s[0] * s[0] + s[1] * s[1]) / s[2];
}

double crb_from_sums(const SystemConfig& config, double theta, const Eigen::Vector3d& s)
{
    double const n = config.n_tx;
    cdouble const b2 = config.b2();
    double const denom = s[0] * s[0] + s[1] * s[1] + 2 * n * b2.real() * s[0] + 2 * n * b2.imag() * s[1]
                         + n * n * std::norm(b2);
    return crb_scale(config, theta) * s[2] / denom;
}

std::vector<SampleTriple> draw_triples(const SystemConfig& config,
                                       TripleKind kind,
                                       std::uint64_t count,
                                       std::uint64_t seed,
                                       unsigned threads)
{
    std::vector<SampleTriple> out(count);
    double const sd = std::sqrt(0.5);
    for_each_block(count, 1 << 14, threads, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t k = begin; k < end; ++k) {
            auto rng = RandomStream::substream(seed, k);
            double const re = rng.normal(sd);
            double const im = rng.normal(sd);
            double const theta = rng.uniform(0.0, pi);
            int const index = static_cast<int>(k % config.n_tx) + 1;
            double const f = steering_phase(theta, config.n_tx, index);
            out[k] = kind == TripleKind::User ? sample_triple_user({re, im}, f, config)
                                              : sample_triple_target({re, im}, f, config);
        }
    });
    return out;
}

double MomentMatch::max_abs_z() const
{
    double worst = 0.0;
    for (auto const& e : entries)
        worst = std::max(worst, std::abs(e.z()));
    return worst;
}

MomentMatch moment_match(std::span<const SampleTriple> samples, const TrivariateGaussian& reference, int blocks)
{
    if (blocks < 2 || samples.size() < static_cast<std::size_t>(2 * blocks))
        throw Error(ErrorCode::InvalidArgument, "moment_match: need at least two samples per block");

    // Raw first and second moments per block: s[0..2] = sums, s[3..8] = cross sums.
    static constexpr std::array<std::array<int, 2>, 6> pairs{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};
    static constexpr std::array<const char*, 9> names{"mean_1", "mean_2", "mean_3", "cov_11", "cov_12",
                                                      "cov_13", "cov_22", "cov_23", "cov_33"};
    using Sums = std::array<double, 9>;
    std::vector<Sums> block_sums(blocks, Sums{});
    std::vector<double> block_n(blocks, 0.0);
    std::size_t const n = samples.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t const b = i * blocks / n;
        double const v[3] = {samples[i].first, samples[i].second, samples[i].third};
        auto& s = block_sums[b];
        for (int r = 0; r < 3; ++r)
            s[r] += v[r];
        for (int p = 0; p < 6; ++p)
            s[3 + p] += v[pairs[p][0]] * v[pairs[p][1]];
        block_n[b] += 1.0;
    }

    auto statistics = [&](const Sums& s, double count) {
        std::array<double, 9> out{};
        for (int r = 0; r < 3; ++r)
            out[r] = s[r] / count;
        for (int p = 0; p < 6; ++p) {
            int const a = pairs[p][0], b = pairs[p][1];
            out[3 + p] = (s[3 + p] - count * out[a] * out[b]) / (count - 1.0);
        }
        return out;
    };

    Sums total{};
    for (auto const& s : block_sums)
        for (int j = 0; j < 9; ++j)
            total[j] += s[j];
    auto const full = statistics(total, static_cast<double>(n));

    std::array<double, 9> mean_loo{}, sq_loo{};
    std::vector<std::array<double, 9>> loo(blocks);
    for (int b = 0; b < blocks; ++b) {
        Sums s = total;
        for (int j = 0; j < 9; ++j)
            s[j] -= block_sums[b][j];
        loo[b] = statistics(s, static_cast<double>(n) - block_n[b]);
        for (int j = 0; j < 9; ++j)
            mean_loo[j] += loo[b][j] / blocks;
    }
    for (int b = 0; b < blocks; ++b)
        for (int j = 0; j < 9; ++j)
            sq_loo[j] += (loo[b][j] - mean_loo[j]) * (loo[b][j] - mean_loo[j]);

    MomentMatch result;
    for (int j = 0; j < 9; ++j) {
        double const expected = j < 3 ? reference.mean[j] : reference.cov(pairs[j - 3][0], pairs[j - 3][1]);
        double const se = std::sqrt((blocks - 1.0) / blocks * sq_loo[j]);
        result.entries.push_back({names[j], full[j], expected, se});
    }
    return result;
}

}  // namespace isacop
