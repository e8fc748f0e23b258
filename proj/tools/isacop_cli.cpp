// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
//
// isacop: outage-probability studies for a downlink ISAC link.
//
//   isacop user-op   [options]   P(SINR < gamma) over a gamma grid
//   isacop target-op [options]   P(CRB > epsilon) over an epsilon grid
//   isacop tradeoff  [options]   (p_u, p_c) along a |b1| or |b2| grid
//   isacop hist      [options]   joint histogram of (X, Y) with the CLT density
//   isacop validate  [options]   self-checks; exit status 1 if any fails
//
// Exit status: 0 success, 1 check or numerical failure, 2 bad input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isacop/isacop.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;

struct Options {
    std::string config;
    std::string seed, trials, theta_nodes, grid, threads, sweep, gamma, epsilon;
    std::vector<std::string> sets;
    std::vector<std::string> outputs;
    std::string plot_script;
};

int exit_code(isacop_status status)
{
    switch (status) {
    case ISACOP_OK: return 0;
    case ISACOP_INVALID_ARGUMENT:
    case ISACOP_INVALID_CONFIG:
    case ISACOP_IO: return kExitBadInput;
    default: return kExitFailure;
    }
}

int report_error(isacop_status status)
{
    std::cerr << "isacop: " << isacop_status_name(status);
    if (*isacop_last_error())
        std::cerr << ": " << isacop_last_error();
    std::cerr << '\n';
    return exit_code(status);
}

void add_shared_options(CLI::App* cmd, Options& opt)
{
    cmd->add_option("--config", opt.config, "key = value configuration file");
    cmd->add_option("--seed", opt.seed, "base seed (u64)");
    cmd->add_option("--trials", opt.trials, "Monte Carlo trials per point");
    cmd->add_option("--theta-nodes", opt.theta_nodes, "Gauss-Legendre nodes over theta");
    cmd->add_option("--out", opt.outputs, "output CSV path (repeatable; default stdout)");
    cmd->add_option("--grid", opt.grid, "comma-separated sweep values");
    cmd->add_option("--gamma", opt.gamma, "SINR threshold where not swept");
    cmd->add_option("--epsilon", opt.epsilon, "CRB threshold where not swept");
    cmd->add_option("--threads", opt.threads, "worker threads (0: all cores)");
    cmd->add_option("--set", opt.sets, "extra key=value setting (repeatable)");
    cmd->add_option("--plot-script", opt.plot_script, "also write a matplotlib script for the CSV");
}

isacop_status apply(isacop_experiment* exp, const Options& opt)
{
    if (!opt.config.empty())
        if (auto s = isacop_experiment_load(exp, opt.config.c_str()); s != ISACOP_OK)
            return s;
    for (auto const& kv : opt.sets) {
        auto const eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "isacop: --set expects key=value, got '" << kv << "'\n";
            return ISACOP_INVALID_ARGUMENT;
        }
        if (auto s = isacop_experiment_set(exp, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()); s != ISACOP_OK)
            return s;
    }
    std::pair<const char*, const std::string*> const flags[] = {
        {"seed", &opt.seed},       {"trials", &opt.trials},   {"theta_nodes", &opt.theta_nodes},
        {"sweep", &opt.sweep},     {"grid", &opt.grid},       {"gamma", &opt.gamma},
        {"epsilon", &opt.epsilon}, {"threads", &opt.threads},
    };
    for (auto const& [key, value] : flags)
        if (!value->empty())
            if (auto s = isacop_experiment_set(exp, key, value->c_str()); s != ISACOP_OK)
                return s;
    return ISACOP_OK;
}

bool write_file(const std::string& path, const char* text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        std::cerr << "isacop: cannot write '" << path << "'\n";
        return false;
    }
    return true;
}

int run(isacop_report report, const Options& opt)
{
    isacop_experiment* raw = nullptr;
    if (auto s = isacop_experiment_create(&raw); s != ISACOP_OK)
        return report_error(s);
    std::unique_ptr<isacop_experiment, decltype(&isacop_experiment_destroy)> exp(raw, isacop_experiment_destroy);

    if (auto s = apply(exp.get(), opt); s != ISACOP_OK)
        return report_error(s);

    std::vector<std::string> outputs = opt.outputs;
    if (outputs.empty())
        for (size_t i = 0; i < isacop_experiment_output_count(exp.get()); ++i)
            outputs.emplace_back(isacop_experiment_output(exp.get(), i));

    char* csv = nullptr;
    auto const status = isacop_run(exp.get(), report, &csv);
    std::unique_ptr<char, decltype(&isacop_free)> text(csv, isacop_free);
    if (text) {
        if (outputs.empty()) {
            std::fputs(text.get(), stdout);
        } else {
            for (auto const& path : outputs)
                if (!write_file(path, text.get()))
                    return kExitBadInput;
        }
    }
    if (status != ISACOP_OK)
        return report_error(status);

    if (!opt.plot_script.empty()) {
        char* script = nullptr;
        std::string const csv_path = outputs.empty() ? "out.csv" : outputs.front();
        if (auto s = isacop_plot_script(report, csv_path.c_str(), &script); s != ISACOP_OK)
            return report_error(s);
        std::unique_ptr<char, decltype(&isacop_free)> owned(script, isacop_free);
        if (!write_file(opt.plot_script, owned.get()))
            return kExitBadInput;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Outage-probability studies for a downlink ISAC link"};
    app.set_version_flag("--version", std::string(isacop_version()));
    app.require_subcommand(1);

    Options opt;
    struct Entry {
        const char* name;
        const char* help;
        isacop_report report;
    };
    Entry const entries[] = {
        {"user-op", "user outage probability over a gamma grid", ISACOP_REPORT_USER_OP},
        {"target-op", "target outage probability over an epsilon grid", ISACOP_REPORT_TARGET_OP},
        {"tradeoff", "(p_u, p_c) along a |b1| or |b2| grid", ISACOP_REPORT_TRADEOFF},
        {"hist", "joint histogram of (X, Y) with the CLT density", ISACOP_REPORT_HISTOGRAM},
        {"validate", "run the bundled self-checks", ISACOP_REPORT_VALIDATE},
    };
    std::vector<std::pair<CLI::App*, isacop_report>> commands;
    for (auto const& e : entries) {
        auto* cmd = app.add_subcommand(e.name, e.help);
        add_shared_options(cmd, opt);
        if (e.report == ISACOP_REPORT_TRADEOFF)
            cmd->add_option("--sweep", opt.sweep, "b1 or b2")->check(CLI::IsMember({"b1", "b2"}));
        commands.emplace_back(cmd, e.report);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int const code = app.exit(e);
        return code == 0 ? 0 : kExitBadInput;
    }

    for (auto const& [cmd, report] : commands)
        if (cmd->parsed())
            return run(report, opt);
    return kExitBadInput;
}
