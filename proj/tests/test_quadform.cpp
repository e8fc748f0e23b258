// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <algorithm>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "errors.hpp"
#include "quadform.hpp"
#include "support.hpp"

using namespace isacop;
using namespace isacop::testing;

namespace {

GChi2Params chi2(int dof, double nc = 0.0, double weight = 1.0)
{
    GChi2Params p;
    p.weights = {weight};
    p.dofs = {dof};
    p.noncentralities = {nc};
    return p;
}

TrivariateGaussian standard()
{
    return {Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity()};
}

// Mean and variance of u^T q2 u + q1^T u + c for u ~ N(mu, cov).
std::pair<double, double> quadratic_moments(const QuadraticDomain& d, const TrivariateGaussian& g)
{
    Eigen::Matrix3d const q = 0.5 * (d.q2 + d.q2.transpose());
    Eigen::Matrix3d const qs = q * g.cov;
    Eigen::Vector3d const grad = 2.0 * q * g.mean + d.q1;
    double const mean = qs.trace() + g.mean.dot(q * g.mean) + d.q1.dot(g.mean) + d.c;
    double const var = 2.0 * (qs * qs).trace() + grad.dot(g.cov * grad);
    return {mean, var};
}

// Fraction of u ~ gauss inside the domain, sampled through a Cholesky factor.
double sampled_domain_probability(const QuadraticDomain& d, const TrivariateGaussian& g, int n, Gen& gen)
{
    Eigen::Matrix3d const l = g.cov.llt().matrixL();
    int hits = 0;
    for (int k = 0; k < n; ++k) {
        Eigen::Vector3d const z(gen.normal(), gen.normal(), gen.normal());
        hits += d.contains(g.mean + l * z);
    }
    return static_cast<double>(hits) / n;
}

}  // namespace

TEST_SUITE("quadform") {

TEST_CASE("PSD square root")
{
    Gen gen(30);
    for (int k = 0; k < 100; ++k) {
        auto const g = gen.gaussian();
        Eigen::Matrix3d const s = psd_sqrt(g.cov);
        CHECK((s * s - g.cov).cwiseAbs().maxCoeff() <= 1e-12 * g.cov.trace());
        CHECK((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * g.cov.trace());
    }
    Eigen::Matrix3d singular = Eigen::Matrix3d::Zero();
    singular(0, 0) = 2.0;
    CHECK((psd_sqrt(singular) * psd_sqrt(singular) - singular).norm() < 1e-15);
    Eigen::Matrix3d negative = Eigen::Matrix3d::Identity();
    negative(2, 2) = -0.5;
    try {
        psd_sqrt(negative);
        FAIL("expected NonPSDCovariance");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPSDCovariance);
    }
}

TEST_CASE("reduction of the chi-square and linear cases")
{
    QuadraticDomain d;
    d.q2.diagonal() << 1.0, 1.0, 0.0;
    d.c = -3.0;
    auto const p = reduce_to_gchi2(d, standard());
    std::vector<double> w = p.weights;
    std::sort(w.begin(), w.end());
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.noncentralities[0] == 0.0);
    CHECK(p.noncentralities[1] == 0.0);
    CHECK(p.lin_coeff == 0.0);
    CHECK(p.offset == -3.0);
    CHECK(domain_probability(d, standard()) == doctest::Approx(1.0 - std::exp(-1.5)).epsilon(1e-8));

    QuadraticDomain lin;
    lin.q1 << 1.0, 0.0, 0.0;
    auto const q = reduce_to_gchi2(lin, standard());
    CHECK(q.weights.empty());
    CHECK(q.lin_coeff == doctest::Approx(1.0));
    CHECK(domain_probability(lin, standard()) == doctest::Approx(0.5).epsilon(1e-12));

    QuadraticDomain empty;
    empty.q2.diagonal() << 1.0, 1.0, 1.0;
    empty.c = 1e6;
    CHECK(domain_probability(empty, standard()) == 0.0);
}

TEST_CASE("reduction preserves mean and variance of the quadratic form")
{
    Gen gen(31);
    for (int k = 0; k < 200; ++k) {
        auto const d = gen.domain();
        auto const g = gen.gaussian();
        auto const [mean, var] = quadratic_moments(d, g);
        auto const p = reduce_to_gchi2(d, g);
        double const scale = std::sqrt(var) + std::abs(mean);
        REQUIRE(std::abs(p.mean() - mean) <= 1e-9 * scale);
        REQUIRE(std::abs(p.variance() - var) <= 1e-9 * var);
    }
}

TEST_CASE("reduction preserves the law")
{
    // Empirical P(u in domain) against empirical P(G < 0), 4 combined SEs.
    Gen gen(32);
    constexpr int n = 1000000;
    int failures = 0;
    for (int k = 0; k < 50; ++k) {
        auto const d = gen.domain();
        auto const g = gen.gaussian();
        double const direct = sampled_domain_probability(d, g, n, gen);
        auto const draws = gchi2_sample(reduce_to_gchi2(d, g), n, 1000 + k);
        double const viaG = static_cast<double>(std::count_if(draws.begin(), draws.end(), [](double v) { return v < 0; })) / n;
        double const se = std::sqrt((direct * (1 - direct) + viaG * (1 - viaG)) / n);
        failures += std::abs(direct - viaG) > 4 * se + 1e-12;
    }
    CHECK(failures == 0);
}

TEST_CASE("affine shift of mean and domain")
{
    Gen gen(33);
    for (int k = 0; k < 50; ++k) {
        auto const d = gen.domain();
        auto const g = gen.gaussian();
        Eigen::Vector3d const delta(gen.normal(), gen.normal(), gen.normal());
        // u' = u + delta lies in the shifted domain iff u lies in d.
        QuadraticDomain shifted;
        Eigen::Matrix3d const q = 0.5 * (d.q2 + d.q2.transpose());
        shifted.q2 = q;
        shifted.q1 = d.q1 - 2.0 * q * delta;
        shifted.c = d.c + delta.dot(q * delta) - d.q1.dot(delta);
        TrivariateGaussian moved = g;
        moved.mean += delta;
        CHECK(std::abs(domain_probability(shifted, moved) - domain_probability(d, g)) <= 1e-9);
    }
}

TEST_CASE("CDF closed forms")
{
    GChi2Params two = chi2(1);
    two.weights.push_back(1.0);
    two.dofs.push_back(1);
    two.noncentralities.push_back(0.0);
    CHECK(std::abs(gchi2_cdf(two, 2.0) - (1.0 - std::exp(-1.0))) <= 1e-8);

    GChi2Params normal;
    normal.lin_coeff = 1.0;
    CHECK(gchi2_cdf(normal, 0.0) == 0.5);
    normal.offset = 0.3;
    normal.lin_coeff = 2.0;
    CHECK(std::abs(gchi2_cdf(normal, 1.0) - normal_cdf(0.35)) <= 1e-14);

    GChi2Params constant;
    constant.offset = 5.0;
    CHECK(gchi2_cdf(constant, 4.999) == 0.0);
    CHECK(gchi2_cdf(constant, 5.0) == 1.0);

    for (int dof = 1; dof <= 6; ++dof) {
        boost::math::chi_squared law(dof);
        for (double x : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0})
            REQUIRE(std::abs(gchi2_cdf(chi2(dof), x) - boost::math::cdf(law, x)) <= 1e-8);
    }
    // -chi2_1: P(-Q <= x) = P(Q >= -x).
    boost::math::chi_squared one(1);
    for (double x : {-4.0, -1.0, -0.1})
        CHECK(std::abs(gchi2_cdf(chi2(1, 0.0, -1.0), x) - boost::math::cdf(boost::math::complement(one, -x))) <= 1e-8);
    // Scaled: 3 chi2_2 <= x  iff  chi2_2 <= x / 3.
    CHECK(std::abs(gchi2_cdf(chi2(2, 0.0, 3.0), 4.0) - (1.0 - std::exp(-4.0 / 6.0))) <= 1e-8);
}

TEST_CASE("CDF against the noncentral chi-square reference")
{
    for (int dof : {1, 2, 4}) {
        for (double nc : {0.3, 2.0, 10.0, 50.0}) {
            boost::math::non_central_chi_squared law(dof, nc);
            for (double q : {0.01, 0.1, 0.5, 0.9, 0.99}) {
                double const x = boost::math::quantile(law, q);
                REQUIRE(std::abs(gchi2_cdf(chi2(dof, nc), x) - q) <= 1e-6);
            }
        }
    }
}

TEST_CASE("CDF is monotone with limits 0 and 1")
{
    Gen gen(34);
    for (int k = 0; k < 30; ++k) {
        auto const p = gen.gchi2();
        double const sd = std::sqrt(p.variance()), mean = p.mean();
        double prev = 0.0;
        for (int j = -20; j <= 20; ++j) {
            double const v = gchi2_cdf(p, mean + 0.3 * j * sd);
            REQUIRE(v >= prev - 1e-6);
            prev = v;
        }
        CHECK(gchi2_cdf(p, mean - 1e3 * sd) <= 1e-6);
        CHECK(gchi2_cdf(p, mean + 1e3 * sd) >= 1.0 - 1e-6);
    }
}

TEST_CASE("mixed-sign example against 1e8 direct draws")
{
    GChi2Params p;
    p.weights = {2.0, -1.0};
    p.dofs = {1, 1};
    p.noncentralities = {0.5, 0.0};
    p.lin_coeff = 0.3;
    p.offset = 0.1;
    Gen gen(35);
    constexpr long n = 100000000;
    long hits = 0;
    for (long k = 0; k < n; ++k)
        hits += gen.gchi2_draw(p) <= 0.0;
    double const emp = static_cast<double>(hits) / n;
    double const se = std::sqrt(emp * (1 - emp) / n);
    CHECK(std::abs(gchi2_cdf(p, 0.0) - emp) <= 3 * se);
}

TEST_CASE("sampler")
{
    auto const draws = gchi2_sample(chi2(1), 1000000, 9);
    double mean = 0.0, m2 = 0.0;
    for (double v : draws)
        mean += v;
    mean /= draws.size();
    for (double v : draws)
        m2 += (v - mean) * (v - mean);
    double const var = m2 / (draws.size() - 1);
    CHECK(std::abs(mean - 1.0) <= 5 * std::sqrt(2.0 / 1e6));
    CHECK(std::abs(var - 2.0) <= 5 * std::sqrt((60.0 - 4.0) / 1e6));  // central 4th moment of chi2_1 is 60

    GChi2Params constant;
    constant.offset = 5.0;
    auto const fives = gchi2_sample(constant, 1000, 1);
    CHECK(std::all_of(fives.begin(), fives.end(), [](double v) { return v == 5.0; }));

    Gen gen(36);
    auto const p = gen.gchi2();
    CHECK(gchi2_sample(p, 10000, 4, 1) == gchi2_sample(p, 10000, 4, 3));
}

TEST_CASE("CDF agrees with the sampler on random parameters")
{
    Gen gen(37);
    constexpr int n = 400000;
    int failures = 0, comparisons = 0;
    for (int k = 0; k < 10; ++k) {
        auto const p = gen.gchi2();
        auto draws = gchi2_sample(p, n, 77 + k);
        std::sort(draws.begin(), draws.end());
        for (int j = 1; j <= 10; ++j) {
            double const x = draws[static_cast<std::size_t>(n * (j - 0.5) / 10.0)];
            double const emp = static_cast<double>(std::upper_bound(draws.begin(), draws.end(), x) - draws.begin()) / n;
            double const se = std::sqrt(emp * (1 - emp) / n);
            failures += std::abs(gchi2_cdf(p, x) - emp) > 3 * se;
            ++comparisons;
        }
    }
    CHECK(comparisons == 100);
    CHECK(failures == 0);
}

TEST_CASE("parameter validation")
{
    GChi2Params bad = chi2(1);
    bad.dofs.push_back(1);
    CHECK_THROWS_AS(gchi2_cdf(bad, 0.0), Error);
    GChi2Params neg = chi2(1, -1.0);
    CHECK_THROWS_AS(gchi2_cdf(neg, 0.0), Error);
    GChi2Params lin = chi2(1);
    lin.lin_coeff = -1.0;
    CHECK_THROWS_AS(gchi2_cdf(lin, 0.0), Error);
}

}  // TEST_SUITE
