// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "quadform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "errors.hpp"
#include "parallel.hpp"
#include "random_stream.hpp"

namespace isacop {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

constexpr double kCovClamp = 1e-12;        // relative to trace
constexpr double kZeroEigen = 1e-10;       // relative to max |eigenvalue|
constexpr double kFlatEigen = 1e-8;        // relative to the linear coefficient
constexpr double kAccuracy = 1e-6;         // absolute CDF accuracy contract
constexpr double kNegligibleTail = 1e-10;  // Chernoff shortcut threshold
constexpr double kTailTarget = 3e-8;       // truncation tail, integral units
constexpr double kPanelTol = 1e-12;
constexpr int kMaxDepth = 30;
constexpr long kMaxPanels = 2'000'000;

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/*!
 * Normalized variable G' = sum w_j chi'^2(k_j, nc_j) + s Z + delta, whose
 * CDF at zero is the requested probability.
 *
 * The characteristic function is evaluated in centred form: the linear phase
 * w_j nc_j t of every noncentral term is folded into `center` = delta +
 * sum w_j nc_j, leaving -2 w_j^2 nc_j t^2 / (1 - 2i w_j t). A reduced quadratic
 * form with a nearly flat direction produces w_j nc_j and delta that are huge
 * and cancel; only their sum enters here.
 */
struct Normalized {
    std::vector<double> w, k, nc;
    double s = 0.0;
    double delta = 0.0;
    double center = 0.0;

    std::complex<double> log_cf(double t) const
    {
        std::complex<double> acc(-0.5 * s * s * t * t, center * t);
        for (std::size_t j = 0; j < w.size(); ++j) {
            std::complex<double> const d(1.0, -2.0 * w[j] * t);
            acc += -0.5 * k[j] * std::log(d) - 2.0 * w[j] * w[j] * nc[j] * t * t / d;
        }
        return acc;
    }

    //! Im[phi(t)] / t, the Gil-Pelaez integrand.
    double integrand(double t) const
    {
        auto const l = log_cf(t);
        return std::exp(l.real()) * std::sin(l.imag()) / t;
    }

    double log_modulus(double t) const
    {
        double acc = -0.5 * s * s * t * t;
        for (std::size_t j = 0; j < w.size(); ++j) {
            double const q = 4.0 * w[j] * w[j] * t * t;
            acc += -0.25 * k[j] * std::log1p(q) - 0.5 * nc[j] * q / (1.0 + q);
        }
        return acc;
    }

    double phase_rate(double t) const
    {
        double rate = center;
        for (std::size_t j = 0; j < w.size(); ++j) {
            double const q = 4.0 * w[j] * w[j] * t * t;
            rate += k[j] * w[j] / (1.0 + q) - w[j] * nc[j] * q * (3.0 + q) / ((1.0 + q) * (1.0 + q));
        }
        return rate;
    }

    //! log E[exp(u G')] on the interval where it is finite.
    double log_mgf(double u) const
    {
        double acc = center * u + 0.5 * s * s * u * u;
        for (std::size_t j = 0; j < w.size(); ++j) {
            double const d = 1.0 - 2.0 * w[j] * u;
            if (d <= 0.0)
                return inf;
            acc += -0.5 * k[j] * std::log(d) + 2.0 * w[j] * w[j] * nc[j] * u * u / d;
        }
        return acc;
    }

    /// Chernoff bound on P(G' <= 0) (lower = true) or P(G' >= 0).
    double chernoff(bool lower) const
    {
        constexpr double kReach = 1e6;
        double lo = lower ? -kReach : 0.0;
        double hi = lower ? 0.0 : kReach;
        for (double wj : w) {
            double const pole = 1.0 / (2.0 * wj);
            if (lower && wj < 0)
                lo = std::max(lo, pole);
            if (!lower && wj > 0)
                hi = std::min(hi, pole);
        }
        // Stay strictly inside the poles.
        double const span = hi - lo;
        lo += 1e-12 * span;
        hi -= 1e-12 * span;
        auto f = [this](double u) { return log_mgf(u); };
        auto const [u_best, value] = boost::math::tools::brent_find_minima(f, lo, hi, 40);
        (void)u_best;
        return std::exp(std::min(0.0, value));
    }

    //! Upper estimate of |integral from T to infinity of the integrand|.
    double tail_estimate(double t) const
    {
        double const amp = std::exp(log_modulus(t));
        double kappa = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            double const q = 4.0 * w[j] * w[j] * t * t;
            kappa += 0.5 * k[j] * q / (1.0 + q);
        }
        double bound = inf;
        if (kappa > 0)
            bound = amp / kappa;
        if (s > 0)
            bound = std::min(bound, amp / (s * s * t * t));
        if (delta != 0.0) {
            // Once the phase rate has settled near delta the tail oscillates
            // with a monotone envelope.
            double const rate = phase_rate(t);
            if (std::abs(rate - delta) <= 0.5 * std::abs(delta))
                bound = std::min(bound, 2.0 * amp / (t * std::abs(rate)));
        }
        return bound;
    }
};

std::pair<double, double> gk15(const Normalized& g, double a, double b)
{
    double const center = 0.5 * (a + b);
    double const half = 0.5 * (b - a);
    double const fc = g.integrand(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        double const dx = half * kXgk[j];
        double const sum = g.integrand(center - dx) + g.integrand(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1)
            gauss += kWg[j / 2] * sum;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

std::pair<double, double> adaptive(const Normalized& g, double a, double b, double tol, int depth)
{
    auto const [value, err] = gk15(g, a, b);
    if (err <= tol || depth >= kMaxDepth)
        return {value, err};
    double const mid = 0.5 * (a + b);
    auto const left = adaptive(g, a, mid, 0.5 * tol, depth + 1);
    auto const right = adaptive(g, mid, b, 0.5 * tol, depth + 1);
    return {left.first + right.first, left.second + right.second};
}

CdfValue invert(const Normalized& g)
{
    if (g.chernoff(true) < kNegligibleTail)
        return {0.0, kNegligibleTail};
    if (g.chernoff(false) < kNegligibleTail)
        return {1.0, kNegligibleTail};

    // Initial panel width from the phase rate near the origin and the
    // spread of the centred noncentral terms.
    double scale = 1.0 + std::abs(g.center);
    for (std::size_t j = 0; j < g.w.size(); ++j)
        scale += std::abs(g.w[j]) * (g.k[j] + std::sqrt(g.nc[j]));
    double const h0 = pi / scale;

    double integral = 0.0, quad_err = 0.0, tail = inf, t = 0.0;
    for (long panel = 0; panel < kMaxPanels; ++panel) {
        // At most two oscillations of the local phase per panel.
        double const rate = std::abs(g.phase_rate(t));
        double const h_cap = rate > 0.0 ? 4.0 * pi / rate : inf;
        double const width = std::min(std::max(h0, 0.5 * t), h_cap);
        auto const [value, err] = adaptive(g, t, t + width, kPanelTol, 0);
        integral += value;
        quad_err += err;
        t += width;
        tail = g.tail_estimate(t);
        if (tail < kTailTarget)
            break;
    }
    return {0.5 - integral / pi, (quad_err + tail) / pi};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

//---------------------------------------------------------------------------//

void GChi2Params::validate() const
{
    if (weights.size() != dofs.size() || weights.size() != noncentralities.size())
        throw Error(ErrorCode::InvalidArgument, "GChi2Params: weights, dofs and noncentralities differ in length");
    if (!(lin_coeff >= 0.0) || !std::isfinite(lin_coeff) || !std::isfinite(offset))
        throw Error(ErrorCode::InvalidArgument, "GChi2Params: lin_coeff must be finite and >= 0");
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(weights[i]) || dofs[i] < 1 || !(noncentralities[i] >= 0.0)
            || !std::isfinite(noncentralities[i]))
            throw Error(ErrorCode::InvalidArgument, fmt::format("GChi2Params: invalid term {}", i));
    }
}

double GChi2Params::mean() const
{
    double m = offset;
    for (std::size_t i = 0; i < weights.size(); ++i)
        m += weights[i] * (dofs[i] + noncentralities[i]);
    return m;
}

double GChi2Params::variance() const
{
    double v = lin_coeff * lin_coeff;
    for (std::size_t i = 0; i < weights.size(); ++i)
        v += 2.0 * weights[i] * weights[i] * (dofs[i] + 2.0 * noncentralities[i]);
    return v;
}

Eigen::Matrix3d psd_sqrt(const Eigen::Matrix3d& cov)
{
    Eigen::Matrix3d const sym = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sym);
    double const trace = std::max(0.0, sym.trace());
    Eigen::Vector3d lambda = eig.eigenvalues();
    for (int i = 0; i < 3; ++i) {
        if (lambda[i] < -kCovClamp * trace)
            throw Error(ErrorCode::NonPSDCovariance,
                        fmt::format("covariance eigenvalue {:.3e} is negative (trace {:.3e})", lambda[i], trace));
        lambda[i] = lambda[i] <= kCovClamp * trace ? 0.0 : std::sqrt(lambda[i]);
    }
    return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

GChi2Params reduce_to_gchi2(const QuadraticDomain& domain, const TrivariateGaussian& gauss)
{
    Eigen::Matrix3d const q2 = 0.5 * (domain.q2 + domain.q2.transpose());
    Eigen::Matrix3d const S = psd_sqrt(gauss.cov);

    // u = S r + mean with r standard normal.
    Eigen::Matrix3d const q2_white = S * q2 * S;
    Eigen::Vector3d const q1_white = 2.0 * S * q2 * gauss.mean + S * domain.q1;
    double const c_white = gauss.mean.dot(q2 * gauss.mean) + domain.q1.dot(gauss.mean) + domain.c;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(0.5 * (q2_white + q2_white.transpose()));
    Eigen::Vector3d const d = eig.eigenvalues();
    Eigen::Vector3d const a = eig.eigenvectors().transpose() * q1_white;
    double const d_max = d.cwiseAbs().maxCoeff();

    GChi2Params out;
    out.offset = c_white;
    double lin2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        // A direction whose curvature is negligible against its slope is
        // linear; completing the square there would cancel catastrophically.
        bool const quadratic = std::abs(d[i]) > kZeroEigen * d_max && std::abs(d[i]) > kFlatEigen * std::abs(a[i]);
        if (quadratic) {
            double const shift = a[i] / (2.0 * d[i]);
            out.weights.push_back(d[i]);
            out.dofs.push_back(1);
            out.noncentralities.push_back(shift * shift);
            out.offset -= a[i] * a[i] / (4.0 * d[i]);
        } else {
            lin2 += a[i] * a[i];
        }
    }
    out.lin_coeff = std::sqrt(lin2);
    return out;
}

CdfValue gchi2_cdf_detailed(const GChi2Params& params, double x)
{
    params.validate();
    double const sd = std::sqrt(params.variance());
    if (sd == 0.0)
        return {x >= params.offset ? 1.0 : 0.0, 0.0};

    Normalized g;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        if (params.weights[i] == 0.0)
            continue;
        g.w.push_back(params.weights[i] / sd);
        g.k.push_back(params.dofs[i]);
        g.nc.push_back(params.noncentralities[i]);
    }
    g.s = params.lin_coeff / sd;
    g.delta = (params.offset - x) / sd;
    long double center = static_cast<long double>(params.offset) - x;
    for (std::size_t i = 0; i < params.weights.size(); ++i)
        center += static_cast<long double>(params.weights[i]) * params.noncentralities[i];
    g.center = static_cast<double>(center / sd);

    if (g.w.empty())
        return {normal_cdf(-g.delta / g.s), 0.0};

    CdfValue r = invert(g);
    if (r.value < -kAccuracy || r.value > 1.0 + kAccuracy || r.error > kAccuracy)
        throw Error(ErrorCode::AccuracyNotReached,
                    fmt::format("gchi2_cdf: value {:.3e} with error estimate {:.3e} exceeds tolerance",
                                r.value, r.error));
    r.value = std::clamp(r.value, 0.0, 1.0);
    return r;
}

double gchi2_cdf(const GChi2Params& params, double x)
{
    return gchi2_cdf_detailed(params, x).value;
}

std::vector<double> gchi2_sample(const GChi2Params& params, std::uint64_t trials, std::uint64_t seed, unsigned threads)
{
    params.validate();
    if (trials < 1)
        throw Error(ErrorCode::InvalidArgument, "gchi2_sample: trials must be >= 1");
    std::vector<double> out(trials);
    for_each_block(trials, 4096, threads, [&](std::uint64_t block, std::uint64_t begin, std::uint64_t end) {
        auto rng = RandomStream::substream(seed, block);
        for (std::uint64_t i = begin; i < end; ++i) {
            double g = params.offset;
            for (std::size_t j = 0; j < params.weights.size(); ++j) {
                double const z0 = rng.normal() + std::sqrt(params.noncentralities[j]);
                double chi = z0 * z0;
                for (int d = 1; d < params.dofs[j]; ++d) {
                    double const z = rng.normal();
                    chi += z * z;
                }
                g += params.weights[j] * chi;
            }
            if (params.lin_coeff > 0.0)
                g += params.lin_coeff * rng.normal();
            out[i] = g;
        }
    });
    return out;
}

double domain_probability(const QuadraticDomain& domain, const TrivariateGaussian& gauss)
{
    auto const params = reduce_to_gchi2(domain, gauss);
    if (params.variance() == 0.0)
        return params.offset < 0.0 ? 1.0 : 0.0;
    return gchi2_cdf(params, 0.0);
}

}  // namespace isacop
