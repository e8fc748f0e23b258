// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <fmt/format.h>

#include "clt_moments.hpp"
#include "core_model.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "quadform.hpp"
#include "random_stream.hpp"

#ifndef ISACOP_VERSION_STRING
#define ISACOP_VERSION_STRING "0.0.0"
#endif

namespace isacop {

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::uint64_t kHistogramBlock = 4096;
constexpr double kHistogramHalfWidth = 4.5;  // in standard deviations

std::string_view trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    auto const last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto const pos = text.find(sep, start);
        parts.push_back(trim(text.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value)
{
    auto v = trim(value);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(std::string(key), fmt::format("expected a non-negative integer, got '{}'", v));
    return out;
}

void require(bool ok, const char* key, const std::string& what)
{
    if (!ok)
        throw ConfigError(key, what);
}

// Fills in the sweep kind and default grid for a command, then validates.
ExperimentSpec resolve(const ExperimentSpec& spec, std::initializer_list<SweepKind> allowed)
{
    ExperimentSpec out = spec;
    if (out.sweep == SweepKind::None)
        out.sweep = *allowed.begin();
    require(std::find(allowed.begin(), allowed.end(), out.sweep) != allowed.end(), "sweep",
            fmt::format("sweep '{}' does not apply to this study", sweep_name(out.sweep)));
    if (out.grid.empty())
        out.grid = default_grid(out.sweep);
    out.validate();
    return out;
}

Table make_table(const ExperimentSpec& spec, std::string_view command)
{
    Table table;
    table.meta.push_back(fmt::format("isacop {}", ISACOP_VERSION_STRING));
    table.meta.push_back(fmt::format("command: {}", command));
    table.meta.push_back(fmt::format("seed: {}", spec.seed));
    table.meta.push_back(fmt::format("trials: {}", spec.trials));
    table.meta.push_back(fmt::format("theta_nodes: {}", spec.theta_nodes));
    table.meta.push_back(fmt::format("gamma: {}", format_number(spec.gamma)));
    table.meta.push_back(fmt::format("epsilon: {}", format_number(spec.epsilon)));
    for (auto const& line : describe(spec.base))
        table.meta.push_back(line);
    if (spec.sweep != SweepKind::None)
        table.meta.push_back(fmt::format("sweep: {} ({} points)", sweep_name(spec.sweep), spec.grid.size()));
    return table;
}

// Evaluates fn(i) for every sweep index, concurrently; results keep grid order.
template <class T, class Fn>
std::vector<T> map_grid(const ExperimentSpec& spec, Fn fn)
{
    std::vector<T> out(spec.grid.size());
    for_each_block(spec.grid.size(), 1, spec.threads,
                   [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                       for (auto i = begin; i < end; ++i)
                           out[i] = fn(i);
                   });
    return out;
}

std::vector<std::string> estimate_row(std::vector<std::string> lead, const Estimate& e)
{
    lead.push_back(format_number(e.value));
    lead.push_back(format_number(e.std_error));
    lead.push_back(method_name(e.method));
    return lead;
}

//---------------------------------------------------------------------------//
// Validation checks
//---------------------------------------------------------------------------//

struct Check {
    std::string name;
    double measured;
    double bound;
};

double max_rel_crb_paths(const SystemConfig& config, std::uint64_t seed)
{
    RandomStream rng = RandomStream::substream(seed, 1);
    double worst = 0.0;
    for (int done = 0; done < 1000;) {
        auto chan = sample_channel(config, rng);
        if (std::abs(cos_angle(chan.theta)) <= 0.05)
            continue;
        double const general = crb_general(config, chan);
        double const simple = crb_simplified(config, chan);
        worst = std::max(worst, std::abs(general - simple) / std::abs(simple));
        ++done;
    }
    return worst;
}

double max_rel_bdot(std::uint64_t seed)
{
    RandomStream rng = RandomStream::substream(seed, 2);
    double worst = 0.0;
    for (int m = 2; m <= 32; ++m) {
        for (int k = 0; k < 100; ++k) {
            double const theta = rng.uniform(0.0, pi);
            double const c = cos_angle(theta);
            double const closed = (m - 1.0) * m * (m + 1.0) * pi * pi * c * c / 12.0;
            double const direct = steering_derivative(theta, m).squaredNorm();
            if (closed > 0.0)
                worst = std::max(worst, std::abs(direct - closed) / closed);
        }
    }
    return worst;
}

double max_abs_chi2_closed_form()
{
    GChi2Params p;
    p.weights = {1.0};
    p.dofs = {2};
    p.noncentralities = {0.0};
    double worst = 0.0;
    for (double x = 0.05; x <= 30.0; x *= 1.3)
        worst = std::max(worst, std::abs(gchi2_cdf(p, x) - (1.0 - std::exp(-0.5 * x))));
    return worst;
}

double max_abs_noncentral_chi2()
{
    double worst = 0.0;
    for (int dof : {1, 3}) {
        for (double nc : {0.5, 4.0}) {
            GChi2Params p;
            p.weights = {1.0};
            p.dofs = {dof};
            p.noncentralities = {nc};
            boost::math::non_central_chi_squared law(dof, nc);
            for (double x : {0.2, 1.0, 3.0, 8.0, 15.0})
                worst = std::max(worst, std::abs(gchi2_cdf(p, x) - boost::math::cdf(law, x)));
        }
    }
    return worst;
}

std::pair<double, double> max_rel_sum_forms(const SystemConfig& config, std::uint64_t seed)
{
    RandomStream rng = RandomStream::substream(seed, 3);
    double sinr_worst = 0.0, crb_worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        auto chan = sample_channel(config, rng);
        double const direct = sinr(config, chan);
        double const viaSums = sinr_from_sums(config, user_sums(config, chan));
        sinr_worst = std::max(sinr_worst, std::abs(direct - viaSums) / direct);
        if (std::abs(cos_angle(chan.theta)) > 0.05) {
            double const crb = crb_simplified(config, chan);
            double const crbSums = crb_from_sums(config, chan.theta, target_sums(config, chan));
            crb_worst = std::max(crb_worst, std::abs(crb - crbSums) / crb);
        }
    }
    return {sinr_worst, crb_worst};
}

}  // namespace

//---------------------------------------------------------------------------//

const char* sweep_name(SweepKind sweep)
{
    switch (sweep) {
    case SweepKind::None: return "none";
    case SweepKind::Gamma: return "gamma";
    case SweepKind::Epsilon: return "epsilon";
    case SweepKind::B1: return "b1";
    case SweepKind::B2: return "b2";
    }
    return "none";
}

SweepKind parse_sweep(std::string_view text)
{
    auto t = trim(text);
    for (auto kind : {SweepKind::None, SweepKind::Gamma, SweepKind::Epsilon, SweepKind::B1, SweepKind::B2})
        if (t == sweep_name(kind))
            return kind;
    throw ConfigError("sweep", fmt::format("expected none, gamma, epsilon, b1 or b2, got '{}'", t));
}

void ExperimentSpec::validate() const
{
    base.validate();
    require(trials >= 1, "trials", "must be at least 1");
    require(theta_nodes >= 8, "theta_nodes", "must be at least 8");
    require(gamma > 0.0, "gamma", "must be positive");
    require(epsilon > 0.0, "epsilon", "must be positive");
    require(bins >= 1, "bins", "must be at least 1");
    if (sweep == SweepKind::None)
        return;
    require(!grid.empty(), "grid", "must not be empty when a sweep is set");
    bool const magnitudes = sweep == SweepKind::B1 || sweep == SweepKind::B2;
    for (double v : grid) {
        if (magnitudes)
            require(v >= 0.0, "grid", "magnitudes must be non-negative");
        else
            require(v > 0.0, "grid", "values must be positive");
    }
}

OutageQuery ExperimentSpec::query() const
{
    OutageQuery q;
    q.config = base;
    q.gamma = gamma;
    q.epsilon = epsilon;
    q.trials = trials;
    q.seed = seed;
    q.theta_nodes = theta_nodes;
    q.threads = threads;
    return q;
}

void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value)
{
    key = trim(key);
    if (set_config_value(spec.base, key, value))
        return;
    std::string const k(key);
    if (k == "sweep")
        spec.sweep = parse_sweep(value);
    else if (k == "grid")
        spec.grid = parse_grid(key, value);
    else if (k == "trials")
        spec.trials = parse_unsigned(key, value);
    else if (k == "seed")
        spec.seed = parse_unsigned(key, value);
    else if (k == "theta_nodes") {
        auto const n = parse_integer(key, value);
        require(n >= 8 && n <= 1 << 20, "theta_nodes", "must be in [8, 2^20]");
        spec.theta_nodes = static_cast<int>(n);
    } else if (k == "gamma")
        spec.gamma = parse_double(key, value);
    else if (k == "epsilon")
        spec.epsilon = parse_double(key, value);
    else if (k == "threads") {
        auto const n = parse_unsigned(key, value);
        require(n <= 4096, "threads", "must be at most 4096");
        spec.threads = static_cast<unsigned>(n);
    } else if (k == "bins") {
        auto const n = parse_integer(key, value);
        require(n >= 1 && n <= 10000, "bins", "must be in [1, 10000]");
        spec.bins = static_cast<int>(n);
    } else if (k == "outputs") {
        spec.outputs.clear();
        for (auto part : split(value, ','))
            if (!part.empty())
                spec.outputs.emplace_back(part);
    } else
        throw ConfigError(k, "unknown key");
}

void load_config_file(ExperimentSpec& spec, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, fmt::format("cannot open config file '{}'", path));
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view = line;
        if (auto const hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = trim(view);
        if (view.empty())
            continue;
        auto const eq = view.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::InvalidConfig,
                        fmt::format("{}:{}: expected 'key = value'", path, number));
        apply_setting(spec, view.substr(0, eq), view.substr(eq + 1));
    }
}

std::vector<double> parse_grid(std::string_view key, std::string_view text)
{
    std::vector<double> grid;
    if (trim(text).empty())
        return grid;
    for (auto part : split(text, ','))
        grid.push_back(parse_double(key, part));
    return grid;
}

std::vector<double> default_grid(SweepKind sweep)
{
    std::vector<double> grid;
    switch (sweep) {
    case SweepKind::Gamma:
        for (int g = 1; g <= 16; ++g)
            grid.push_back(g);
        break;
    case SweepKind::Epsilon:
        for (int k = 0; k < 12; ++k)
            grid.push_back(std::pow(10.0, -9.5 + 0.5 * k));
        break;
    case SweepKind::B1:
    case SweepKind::B2:
        for (int k = 1; k <= 19; ++k)
            grid.push_back(0.05 * k);
        break;
    case SweepKind::None:
        break;
    }
    return grid;
}

std::string format_number(double value)
{
    if (value == 0.0)
        return "0";  // folds -0
    return fmt::format("{:.12g}", value);
}

std::string Table::to_csv() const
{
    std::string out;
    for (auto const& line : meta)
        out += "# " + line + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out += (i ? "," : "") + columns[i];
    out += "\n";
    for (auto const& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + row[i];
        out += "\n";
    }
    return out;
}

//---------------------------------------------------------------------------//
// Studies
//---------------------------------------------------------------------------//

Table run_user_op_sweep(const ExperimentSpec& input)
{
    auto const spec = resolve(input, {SweepKind::Gamma});
    Table table = make_table(spec, "user-op");
    table.meta.push_back("monte carlo: common random numbers across the grid");
    table.columns = {"gamma", "p_u", "std_error", "method"};

    auto const analytic = map_grid<Estimate>(spec, [&](std::size_t i) {
        auto q = spec.query();
        q.gamma = spec.grid[i];
        return user_op_analytic(q);
    });
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        auto q = spec.query();
        q.gamma = spec.grid[i];
        auto const mc = user_op_montecarlo(q);
        table.rows.push_back(estimate_row({format_number(q.gamma)}, analytic[i]));
        table.rows.push_back(estimate_row({format_number(q.gamma)}, mc));
    }
    return table;
}

Table run_target_op_sweep(const ExperimentSpec& input)
{
    auto const spec = resolve(input, {SweepKind::Epsilon});
    Table table = make_table(spec, "target-op");
    table.meta.push_back("epsilon_db: 10*log10(epsilon)");
    table.meta.push_back("monte carlo: common random numbers across the grid");
    table.columns = {"epsilon", "epsilon_db", "p_c", "std_error", "method"};

    auto const analytic = map_grid<Estimate>(spec, [&](std::size_t i) {
        auto q = spec.query();
        q.epsilon = spec.grid[i];
        return target_op_analytic(q);
    });
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        auto q = spec.query();
        q.epsilon = spec.grid[i];
        auto const mc = target_op_montecarlo(q);
        std::vector<std::string> lead = {format_number(q.epsilon), format_number(10.0 * std::log10(q.epsilon))};
        table.rows.push_back(estimate_row(lead, analytic[i]));
        table.rows.push_back(estimate_row(lead, mc));
    }
    return table;
}

Table run_tradeoff(const ExperimentSpec& input)
{
    auto const spec = resolve(input, {SweepKind::B1, SweepKind::B2});
    bool const first = spec.sweep == SweepKind::B1;
    char const* const swept = first ? "b1_mag" : "b2_mag";
    Table table = make_table(spec, "tradeoff");
    table.meta.push_back(fmt::format("fixed: {}={} (non-swept magnitude held at its base value)",
                                     first ? "b2_mag" : "b1_mag",
                                     format_number(first ? spec.base.b2_mag : spec.base.b1_mag)));
    table.columns = {"swept_param", "value", "p_u", "p_c"};

    auto const pairs = map_grid<std::pair<double, double>>(spec, [&](std::size_t i) {
        auto q = spec.query();
        (first ? q.config.b1_mag : q.config.b2_mag) = spec.grid[i];
        q.config.validate();
        return std::pair{user_op_analytic(q).value, target_op_analytic(q).value};
    });
    for (std::size_t i = 0; i < spec.grid.size(); ++i)
        table.rows.push_back({swept, format_number(spec.grid[i]), format_number(pairs[i].first),
                              format_number(pairs[i].second)});
    return table;
}

Table run_histogram(const ExperimentSpec& input)
{
    ExperimentSpec spec = input;
    spec.sweep = SweepKind::None;
    spec.validate();
    require(spec.trials >= 10000, "trials", "histogram needs at least 10000 trials");

    auto const& config = spec.base;
    auto const gauss = moments_user(config);
    int const bins = spec.bins;
    double const sx = std::sqrt(gauss.cov(0, 0)), sy = std::sqrt(gauss.cov(1, 1));
    double const x0 = gauss.mean(0) - kHistogramHalfWidth * sx, x1 = gauss.mean(0) + kHistogramHalfWidth * sx;
    double const y0 = gauss.mean(1) - kHistogramHalfWidth * sy, y1 = gauss.mean(1) + kHistogramHalfWidth * sy;
    double const dx = (x1 - x0) / bins, dy = (y1 - y0) / bins;

    auto const blocks = block_count(spec.trials, kHistogramBlock);
    std::vector<std::vector<std::uint64_t>> partial(blocks);
    for_each_block(spec.trials, kHistogramBlock, spec.threads,
                   [&](std::uint64_t block, std::uint64_t begin, std::uint64_t end) {
                       auto& counts = partial[block];
                       counts.assign(static_cast<std::size_t>(bins) * bins + 1, 0);  // last: outside
                       for (auto t = begin; t < end; ++t) {
                           auto rng = RandomStream::substream(spec.seed, t);
                           auto const u = user_sums(config, sample_channel(config, rng));
                           auto const ix = static_cast<long>(std::floor((u(0) - x0) / dx));
                           auto const iy = static_cast<long>(std::floor((u(1) - y0) / dy));
                           if (ix < 0 || ix >= bins || iy < 0 || iy >= bins)
                               ++counts.back();
                           else
                               ++counts[static_cast<std::size_t>(ix) * bins + iy];
                       }
                   });
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins) * bins + 1, 0);
    for (auto const& c : partial)
        for (std::size_t i = 0; i < c.size(); ++i)
            counts[i] += c[i];

    Eigen::Matrix2d const cov = gauss.cov.topLeftCorner<2, 2>();
    Eigen::Matrix2d const prec = cov.inverse();
    double const norm = 1.0 / (2.0 * pi * std::sqrt(cov.determinant()));

    Table table = make_table(spec, "hist");
    table.meta.push_back(fmt::format("bins: {} x {}", bins, bins));
    table.meta.push_back(fmt::format("x_range: {},{}", format_number(x0), format_number(x1)));
    table.meta.push_back(fmt::format("y_range: {},{}", format_number(y0), format_number(y1)));
    table.meta.push_back(fmt::format("outside: {}", counts.back()));
    table.columns = {"x_center", "y_center", "count", "density_empirical", "density_clt"};
    double const scale = 1.0 / (static_cast<double>(spec.trials) * dx * dy);
    for (int ix = 0; ix < bins; ++ix) {
        for (int iy = 0; iy < bins; ++iy) {
            double const xc = x0 + (ix + 0.5) * dx, yc = y0 + (iy + 0.5) * dy;
            Eigen::Vector2d const d(xc - gauss.mean(0), yc - gauss.mean(1));
            double const density = norm * std::exp(-0.5 * d.dot(prec * d));
            auto const count = counts[static_cast<std::size_t>(ix) * bins + iy];
            table.rows.push_back({format_number(xc), format_number(yc), std::to_string(count),
                                  format_number(static_cast<double>(count) * scale), format_number(density)});
        }
    }
    return table;
}

Table run_validate(const ExperimentSpec& input)
{
    ExperimentSpec spec = input;
    spec.sweep = SweepKind::None;
    spec.validate();
    auto const& config = spec.base;

    std::vector<std::pair<std::string, std::function<Check()>>> checks;
    checks.emplace_back("moments_user", [&] {
        auto const draws = draw_triples(config, TripleKind::User, spec.trials, spec.seed, spec.threads);
        return Check{"", moment_match(draws, per_antenna_moments_user(config)).max_abs_z(), 5.0};
    });
    checks.emplace_back("moments_target", [&] {
        auto const draws = draw_triples(config, TripleKind::Target, spec.trials, spec.seed, spec.threads);
        return Check{"", moment_match(draws, per_antenna_moments_target(config)).max_abs_z(), 5.0};
    });
    checks.emplace_back("crb_paths", [&] { return Check{"", max_rel_crb_paths(config, spec.seed), 1e-8}; });
    checks.emplace_back("steering_derivative_norm", [&] { return Check{"", max_rel_bdot(spec.seed), 1e-10}; });
    checks.emplace_back("gchi2_central_closed_form", [&] { return Check{"", max_abs_chi2_closed_form(), 1e-6}; });
    checks.emplace_back("gchi2_noncentral_reference", [&] { return Check{"", max_abs_noncentral_chi2(), 1e-6}; });
    checks.emplace_back("sinr_sum_form", [&] { return Check{"", max_rel_sum_forms(config, spec.seed).first, 1e-10}; });
    checks.emplace_back("crb_sum_form", [&] { return Check{"", max_rel_sum_forms(config, spec.seed).second, 1e-10}; });
    checks.emplace_back("user_op_theta_independence", [&] {
        auto const q = spec.query();
        return Check{"", std::abs(user_op_analytic(q).value - user_op_analytic_theta_averaged(q).value), 1e-9};
    });
    checks.emplace_back("user_op_analytic_vs_mc", [&] {
        auto const q = spec.query();
        auto const mc = user_op_montecarlo(q);
        double const floor = config.n_tx <= 9 ? 0.02 : 0.01;
        return Check{"", std::abs(user_op_analytic(q).value - mc.value), std::max(floor, 4.0 * mc.std_error)};
    });
    checks.emplace_back("target_op_analytic_vs_mc", [&] {
        auto const q = spec.query();
        auto const mc = target_op_montecarlo(q);
        return Check{"", std::abs(target_op_analytic(q).value - mc.value), std::max(0.02, 4.0 * mc.std_error)};
    });

    Table table = make_table(spec, "validate");
    table.columns = {"check", "measured", "bound", "status"};
    for (auto const& [name, run] : checks) {
        double measured = std::numeric_limits<double>::quiet_NaN(), bound = 0.0;
        std::string status;
        try {
            auto const c = run();
            measured = c.measured;
            bound = c.bound;
            status = measured <= bound ? "PASS" : "FAIL";
        } catch (const Error& e) {
            status = "FAIL";
            table.meta.push_back(fmt::format("{}: {}", name, e.what()));
        }
        if (status != "PASS")
            ++table.failures;
        table.rows.push_back({name, std::isnan(measured) ? "nan" : format_number(measured), format_number(bound), status});
    }
    table.meta.push_back(fmt::format("failures: {}", table.failures));
    return table;
}

std::string plot_script(std::string_view command, std::string_view csv_path)
{
    std::string body;
    if (command == "user-op" || command == "target-op") {
        bool const user = command == "user-op";
        body = fmt::format(
            "for method, style in (('analytic', '-'), ('monte-carlo', 'o')):\n"
            "    part = df[df['method'] == method]\n"
            "    plt.semilogy(part['{0}'], part['{1}'], style, label=method)\n"
            "plt.xlabel('{2}')\nplt.ylabel('{1}')\nplt.legend()\n",
            user ? "gamma" : "epsilon_db", user ? "p_u" : "p_c", user ? "gamma" : "epsilon (dB)");
    } else if (command == "tradeoff") {
        body = "plt.plot(df['p_u'], df['p_c'], 'o-')\n"
               "plt.xlabel('p_u')\nplt.ylabel('p_c')\n";
    } else if (command == "hist") {
        body = "n = int(round(len(df) ** 0.5))\n"
               "z = df['density_empirical'].to_numpy().reshape(n, n).T\n"
               "x = df['x_center'].to_numpy().reshape(n, n)[:, 0]\n"
               "y = df['y_center'].to_numpy().reshape(n, n)[0, :]\n"
               "plt.pcolormesh(x, y, z, shading='auto')\n"
               "plt.contour(x, y, df['density_clt'].to_numpy().reshape(n, n).T, colors='w')\n"
               "plt.xlabel('X')\nplt.ylabel('Y')\n";
    } else {
        throw Error(ErrorCode::InvalidArgument, fmt::format("no plot for '{}'", command));
    }
    return fmt::format("import matplotlib.pyplot as plt\nimport pandas as pd\n\n"
                       "df = pd.read_csv('{}', comment='#')\n{}plt.show()\n",
                       csv_path, body);
}

}  // namespace isacop
