// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "outage.hpp"
#include "support.hpp"

using namespace isacop;
using namespace isacop::testing;

namespace {

OutageQuery query(double gamma = 8.0, double epsilon = 8e-7, std::uint64_t trials = 100000)
{
    OutageQuery q;
    q.gamma = gamma;
    q.epsilon = epsilon;
    q.trials = trials;
    return q;
}

}  // namespace

TEST_SUITE("outage") {

TEST_CASE("query validation")
{
    auto q = query();
    q.trials = 0;
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = query();
    q.theta_nodes = 7;
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = query(-1.0);
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = query(0.0);
    CHECK_THROWS_AS(user_op_analytic(q), ConfigError);
    q = query(8.0, 0.0);
    CHECK_THROWS_AS(target_op_analytic(q), ConfigError);
}

TEST_CASE("domains encode the outage events")
{
    Gen gen(40);
    for (int k = 0; k < 500; ++k) {
        auto const c = gen.config();
        ChannelRealization const chan{gen.channel(c.n_tx), gen.theta_away_from_broadside(0.05)};
        double const s = sinr(c, chan);
        double const gamma = s * std::exp(gen.uniform(-1.0, 1.0));
        REQUIRE(user_domain(c, gamma).contains(user_sums(c, chan)) == (s < gamma));
        double const crb = crb_simplified(c, chan);
        double const eps = crb * std::exp(gen.uniform(-1.0, 1.0));
        REQUIRE(target_domain(c, eps, chan.theta).contains(target_sums(c, chan)) == (crb > eps));
    }
    // Broadside: unbounded CRB wherever K > 0.
    auto const d = target_domain(SystemConfig{}, 8e-7, pi / 2);
    CHECK(d.contains(Eigen::Vector3d(1.0, 1.0, 0.5)));
    CHECK_FALSE(d.contains(Eigen::Vector3d(1.0, 1.0, -0.5)));
}

TEST_CASE("user OP: limits and monotonicity in gamma")
{
    CHECK(user_op_analytic(query(1e-8)).value < 1e-6);
    CHECK(user_op_analytic(query(1e8)).value > 1.0 - 1e-6);
    double prev = 0.0;
    for (double g = 0.5; g <= 40.0; g *= 1.25) {
        double const v = user_op_analytic(query(g)).value;
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(user_op_analytic(query()).std_error == 0.0);
    CHECK(user_op_analytic(query()).method == Method::Analytic);
}

TEST_CASE("user OP: explicit theta average equals the theta-free form")
{
    for (double g : {1.0, 4.0, 8.0, 16.0}) {
        auto const q = query(g);
        CHECK(std::abs(user_op_analytic(q).value - user_op_analytic_theta_averaged(q).value) < 1e-9);
    }
}

TEST_CASE("user OP analytic equals sampling of the Gaussian (X, Y, K) law")
{
    // Reference-scenario user domain at gamma = 8 against 1e7 Gaussian draws.
    SystemConfig c;
    auto const gauss = moments_user(c);
    auto const domain = user_domain(c, 8.0);
    Eigen::Matrix3d const l = gauss.cov.llt().matrixL();
    Gen gen(41);
    constexpr int n = 10000000;
    int hits = 0;
    for (int k = 0; k < n; ++k)
        hits += domain.contains(gauss.mean + l * Eigen::Vector3d(gen.normal(), gen.normal(), gen.normal()));
    double const emp = static_cast<double>(hits) / n;
    CHECK(std::abs(user_op_analytic(query()).value - emp) <= 3 * std::sqrt(emp * (1 - emp) / n));
}

TEST_CASE("Monte Carlo estimators: reproducibility and binomial error")
{
    auto q = query(8.0, 8e-7, 20000);
    q.threads = 1;
    auto const a = user_op_montecarlo(q);
    auto const b = target_op_montecarlo(q);
    q.threads = 4;
    CHECK(user_op_montecarlo(q).value == a.value);
    CHECK(target_op_montecarlo(q).value == b.value);
    CHECK(a.std_error == doctest::Approx(std::sqrt(a.value * (1 - a.value) / 20000)).epsilon(1e-12));
    CHECK(a.method == Method::MonteCarlo);

    q.trials = 1;
    double const one = user_op_montecarlo(q).value;
    CHECK((one == 0.0 || one == 1.0));

    q = query(0.0, 0.0, 5000);
    CHECK(user_op_montecarlo(q).value == 0.0);
    CHECK(user_op_montecarlo(q).std_error == 0.0);
    CHECK(target_op_montecarlo(q).value == 1.0);

    q = query(8.0, 1e3, 1000);
    q.fixed_theta = pi / 2;
    CHECK(target_op_montecarlo(q).value == 1.0);
}

TEST_CASE("Monte Carlo user OP is nondecreasing in gamma")
{
    double prev = 0.0;
    for (double g = 1.0; g <= 16.0; g += 1.0) {
        double const v = user_op_montecarlo(query(g, 8e-7, 20000)).value;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("target OP: limits, monotonicity and Monte Carlo agreement")
{
    CHECK(target_op_analytic(query(8.0, 1e-12)).value > 1.0 - 1e-6);
    CHECK(target_op_analytic(query(8.0, 1e3)).value < 1e-3);
    double prev_a = 1.0, prev_m = 1.0;
    for (int k = -6; k <= 6; k += 2) {
        double const eps = 8e-7 * std::pow(10.0, k / 2.0);
        auto const a = target_op_analytic(query(8.0, eps));
        auto const m = target_op_montecarlo(query(8.0, eps));
        CHECK(a.value <= prev_a);
        CHECK(m.value <= prev_m);
        CHECK(std::abs(a.value - m.value) <= std::max(0.02, 4 * m.std_error));
        prev_a = a.value;
        prev_m = m.value;
    }
}

TEST_CASE("target OP is free of phi1")
{
    auto q = query();
    double const base = target_op_analytic(q).value;
    q.config.b1_phase += 0.9;
    CHECK(std::abs(target_op_analytic(q).value - base) < 1e-9);
}

TEST_CASE("target OP quadrature does not depend on the node count")
{
    auto q = query();
    double const base = target_op_analytic(q).value;
    q.theta_nodes = 128;
    CHECK(std::abs(target_op_analytic(q).value - base) < 1e-4);
}

TEST_CASE("ergodic rate")
{
    auto q = query(8.0, 8e-7, 50000);
    auto const r = ergodic_rate_montecarlo(q);
    CHECK(r.value > 0.0);
    CHECK(std::isfinite(r.value));
    CHECK(ergodic_rate_montecarlo(q).value == r.value);

    q.config.p_t = 1e-9;
    CHECK(ergodic_rate_montecarlo(q).value < 1e-6);

    // MRT: SINR = rho |h|^2 with |h|^2 ~ Gamma(N, 1).
    q = query(8.0, 8e-7, 200000);
    q.config.b2_mag = 0.0;
    double const rho = q.config.p_t / q.config.sigma_u2;
    boost::math::gamma_distribution<double> law(q.config.n_tx, 1.0);
    auto integrand = [&](double x) { return std::log2(1.0 + rho * x) * boost::math::pdf(law, x); };
    double const exact = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
    auto const mc = ergodic_rate_montecarlo(q);
    CHECK(std::abs(mc.value - exact) <= 4 * mc.std_error);
}

TEST_CASE("Gauss-Legendre rule")
{
    for (int n : {8, 17, 32, 64}) {
        auto const [x, w] = gauss_legendre(n);
        REQUIRE(x.size() == static_cast<std::size_t>(n));
        for (int deg = 0; deg < 2 * n; ++deg) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j)
                sum += w[j] * std::pow(x[j], deg);
            double const exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            REQUIRE(std::abs(sum - exact) < 1e-13);
        }
    }
}

}  // TEST_SUITE
