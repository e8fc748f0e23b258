// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "outage.hpp"

namespace isacop {

enum class SweepKind { None, Gamma, Epsilon, B1, B2 };

const char* sweep_name(SweepKind sweep);
SweepKind parse_sweep(std::string_view text);

/// A study: base link parameters, an optional one-parameter sweep and the
/// Monte Carlo / quadrature settings shared by every point.
struct ExperimentSpec {
    SystemConfig base;
    SweepKind sweep = SweepKind::None;
    std::vector<double> grid;
    std::uint64_t trials = 100000;
    std::uint64_t seed = kDefaultSeed;
    int theta_nodes = 64;
    double gamma = 8.0;     // fixed SINR threshold where not swept
    double epsilon = 8e-7;  // fixed CRB threshold where not swept
    unsigned threads = 0;
    int bins = 50;          // histogram bins per axis
    std::vector<std::string> outputs;

    //! Throws ConfigError naming the offending key.
    void validate() const;

    OutageQuery query() const;
};

/// Sets one `key = value` pair. Keys are the SystemConfig names (N, M, p_t,
/// sigma_u2, sigma_r2, L, alpha, b1_mag, b1_phase, b2_mag, b2_phase) and the
/// ExperimentSpec fields (sweep, grid, trials, seed, theta_nodes, gamma,
/// epsilon, threads, bins, outputs). Throws ConfigError for unknown keys and
/// unparsable values.
void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value);

/// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
void load_config_file(ExperimentSpec& spec, const std::string& path);

//! Comma-separated list of numbers.
std::vector<double> parse_grid(std::string_view key, std::string_view text);

//! Grid used when a sweep is requested without explicit values.
std::vector<double> default_grid(SweepKind sweep);

//! A CSV table with `#` metadata lines ahead of the header row.
struct Table {
    std::vector<std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    int failures = 0;  // failed checks, validation reports only

    std::string to_csv() const;
};

//! Rows (gamma, p_u, std_error, method): analytic then Monte Carlo per gamma.
Table run_user_op_sweep(const ExperimentSpec& spec);

//! Rows (epsilon, epsilon_db, p_c, std_error, method) with epsilon_db = 10 log10(epsilon).
Table run_target_op_sweep(const ExperimentSpec& spec);

/// Analytic (p_u, p_c) along a |b1| or |b2| grid; the other magnitude stays
/// at its base value.
Table run_tradeoff(const ExperimentSpec& spec);

/// bins x bins histogram of (X, Y) over `trials` channel draws on the window
/// mean +- 4.5 sd of the CLT law, with the CLT density at every bin centre.
Table run_histogram(const ExperimentSpec& spec);

//! One row per check (check, measured, bound, status); `failures` counts the FAILs.
Table run_validate(const ExperimentSpec& spec);

/// Small matplotlib script that plots the CSV written for `command`.
std::string plot_script(std::string_view command, std::string_view csv_path);

std::string format_number(double value);

}  // namespace isacop
