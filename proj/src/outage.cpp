// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "outage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include <fmt/format.h>

#include "core_model.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace isacop {

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::uint64_t kBlock = 4096;
constexpr double kThetaTolerance = 1e-4;
// Breakpoints of the theta rule, as fractions of the conditional outage
// probability's limit at theta = pi/2.
constexpr std::array<double, 5> kTransitionLevels{1e-10, 1e-3, 0.5, 1.0 - 1e-3, 1.0 - 1e-10};

void require_query(bool ok, const char* key, const std::string& what)
{
    if (!ok)
        throw ConfigError(key, what);
}

ChannelRealization draw(const OutageQuery& q, std::uint64_t trial)
{
    auto rng = RandomStream::substream(q.seed, trial);
    auto chan = sample_channel(q.config, rng);
    if (q.fixed_theta)
        chan.theta = *q.fixed_theta;
    return chan;
}

/// Fraction of trials for which `event(chan)` holds, with binomial standard
/// error. Per-block counts are reduced in block order.
template <class Event>
Estimate binomial_estimate(const OutageQuery& q, Event event)
{
    std::vector<std::uint64_t> hits(block_count(q.trials, kBlock), 0);
    for_each_block(q.trials, kBlock, q.threads, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        std::uint64_t count = 0;
        for (std::uint64_t k = begin; k < end; ++k)
            count += event(draw(q, k)) ? 1 : 0;
        hits[b] = count;
    });
    std::uint64_t total = 0;
    for (auto h : hits)
        total += h;
    double const n = static_cast<double>(q.trials);
    double const p = total / n;
    return {p, std::sqrt(p * (1.0 - p) / n), Method::MonteCarlo};
}

double gl_panel(double a, double b, int nodes, const std::function<double(double)>& f)
{
    auto const [x, w] = gauss_legendre(nodes);
    double const half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        sum += w[j] * f(mid + half * x[j]);
    return half * sum;
}

//! Smallest u in [0, pi/2] with p(u) above `level`, for nondecreasing p.
double bisect_level(const std::function<double(double)>& p, double level)
{
    double lo = 0.0, hi = 0.5 * pi;
    if (p(lo) > level)
        return lo;
    for (int iter = 0; iter < 50; ++iter) {
        double const mid = 0.5 * (lo + hi);
        (p(mid) > level ? hi : lo) = mid;
    }
    return hi;
}

//! Composite Gauss-Legendre over [0, pi/2] split at `breaks`.
double composite(const std::function<double(double)>& p, int nodes, const std::vector<double>& breaks)
{
    double sum = 0.0, left = 0.0;
    for (double right : breaks) {
        sum += gl_panel(left, right, nodes, p);
        left = right;
    }
    return sum + gl_panel(left, 0.5 * pi, nodes, p);
}

}  // namespace

void OutageQuery::validate() const
{
    config.validate();
    require_query(trials >= 1, "trials", "must be >= 1");
    require_query(theta_nodes >= 8, "theta_nodes", "must be >= 8");
    require_query(std::isfinite(gamma) && gamma >= 0.0, "gamma", "must be >= 0");
    require_query(std::isfinite(epsilon) && epsilon >= 0.0, "epsilon", "must be >= 0");
}

const char* method_name(Method method)
{
    return method == Method::Analytic ? "analytic" : "monte-carlo";
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int count)
{
    std::vector<double> x(count), w(count);
    for (int i = 0; i < (count + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (count + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p0 = 0.0;
            for (int k = 1; k <= count; ++k) {
                double const prev = p0;
                p0 = p1;
                p1 = ((2.0 * k - 1.0) * z * p0 - (k - 1.0) * prev) / k;
            }
            dp = count * (z * p1 - p0) / (z * z - 1.0);
            double const step = p1 / dp;
            z -= step;
            if (std::abs(step) < 1e-15)
                break;
        }
        x[i] = -z;
        x[count - 1 - i] = z;
        w[i] = w[count - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

QuadraticDomain user_domain(const SystemConfig& config, double gamma)
{
    QuadraticDomain d;
    d.q2.diagonal() << 1.0, 1.0, 0.0;
    d.q1 << 0.0, 0.0, -gamma * config.sigma_u2 / config.p_t;
    d.c = 0.0;
    return d;
}

QuadraticDomain target_domain(const SystemConfig& config, double epsilon, double theta)
{
    double const n = config.n_tx;
    cdouble const b2 = config.b2();
    double const g = crb_scale(config, theta);
    QuadraticDomain d;
    if (!std::isfinite(g)) {
        // cos(theta) = 0: the CRB is unbounded wherever K > 0.
        d.q1 << 0.0, 0.0, -1.0;
        return d;
    }
    d.q2.diagonal() << epsilon, epsilon, 0.0;
    d.q1 << 2.0 * n * epsilon * b2.real(), 2.0 * n * epsilon * b2.imag(), -g;
    d.c = epsilon * n * n * std::norm(b2);
    return d;
}

Estimate user_op_analytic(const OutageQuery& query)
{
    query.validate();
    require_query(query.gamma > 0.0, "gamma", "must be > 0 for the analytic user outage");
    return {domain_probability(user_domain(query.config, query.gamma), moments_user(query.config)), 0.0,
            Method::Analytic};
}

Estimate user_op_analytic_theta_averaged(const OutageQuery& query)
{
    query.validate();
    require_query(query.gamma > 0.0, "gamma", "must be > 0 for the analytic user outage");
    auto const domain = user_domain(query.config, query.gamma);
    auto const [nodes, weights] = gauss_legendre(query.theta_nodes);
    double sum = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        double const theta = 0.5 * pi * (nodes[j] + 1.0);
        sum += 0.5 * weights[j] * domain_probability(domain, conditional_moments_user(query.config, theta));
    }
    return {sum, 0.0, Method::Analytic};
}

Estimate user_op_montecarlo(const OutageQuery& query)
{
    query.validate();
    return binomial_estimate(query, [&](const ChannelRealization& chan) {
        return sinr(query.config, chan) < query.gamma;
    });
}

Estimate target_op_analytic(const OutageQuery& query)
{
    query.validate();
    require_query(query.epsilon > 0.0, "epsilon", "must be > 0 for the analytic target outage");
    auto const gauss = moments_target(query.config);
    auto conditional = [&](double theta) {
        return domain_probability(target_domain(query.config, query.epsilon, theta), gauss);
    };
    // p(u) on each half, u = distance from the array axis; nondecreasing in u.
    std::function<double(double)> const lower = [&](double u) { return conditional(u); };
    std::function<double(double)> const upper = [&](double u) { return conditional(pi - u); };
    double const limit = conditional(0.5 * pi);

    int const nodes = (query.theta_nodes + 1) / 2;
    double coarse = 0.0, fine = 0.0;
    for (auto const* p : {&lower, &upper}) {
        std::vector<double> breaks;
        for (double level : kTransitionLevels)
            breaks.push_back(limit > 0.0 ? bisect_level(*p, level * limit) : 0.5 * pi);
        coarse += composite(*p, nodes, breaks);
        fine += composite(*p, 2 * nodes, breaks);
    }
    coarse /= pi;
    fine /= pi;
    if (std::abs(fine - coarse) > kThetaTolerance)
        throw Error(ErrorCode::QuadratureNotConverged,
                    fmt::format("target outage: theta quadrature changed by {:.3e} on doubling", fine - coarse));
    return {std::clamp(fine, 0.0, 1.0), 0.0, Method::Analytic};
}

Estimate target_op_montecarlo(const OutageQuery& query)
{
    query.validate();
    return binomial_estimate(query, [&](const ChannelRealization& chan) {
        try {
            return crb_simplified(query.config, chan) > query.epsilon;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SingularFisher)
                return true;
            throw;
        }
    });
}

Estimate ergodic_rate_montecarlo(const OutageQuery& query)
{
    query.validate();
    std::uint64_t const blocks = block_count(query.trials, kBlock);
    std::vector<double> sums(blocks, 0.0), squares(blocks, 0.0);
    for_each_block(query.trials, kBlock, query.threads, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        double s = 0.0, s2 = 0.0;
        for (std::uint64_t k = begin; k < end; ++k) {
            double const rate = std::log2(1.0 + sinr(query.config, draw(query, k)));
            s += rate;
            s2 += rate * rate;
        }
        sums[b] = s;
        squares[b] = s2;
    });
    double s = 0.0, s2 = 0.0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        s += sums[b];
        s2 += squares[b];
    }
    double const n = static_cast<double>(query.trials);
    double const mean = s / n;
    double const var = n > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n), Method::MonteCarlo};
}

}  // namespace isacop
