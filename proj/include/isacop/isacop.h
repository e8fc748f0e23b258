/*
 * Copyright 2026 The isacop developers.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the isacop outage-probability library.
 *
 * Every fallible call returns an isacop_status. On failure a description of
 * the most recent error on the calling thread is available from
 * isacop_last_error(). Handles are not safe for concurrent use from several
 * threads; distinct handles are independent.
 */
#ifndef ISACOP_ISACOP_H
#define ISACOP_ISACOP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ISACOP_BUILDING_LIBRARY)
#    define ISACOP_API __declspec(dllexport)
#  else
#    define ISACOP_API __declspec(dllimport)
#  endif
#else
#  define ISACOP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum isacop_status {
    ISACOP_OK = 0,
    ISACOP_INVALID_ARGUMENT = 1,
    ISACOP_INVALID_CONFIG = 2,
    ISACOP_DEGENERATE_BEAMFORMER = 3,
    ISACOP_SINGULAR_FISHER = 4,
    ISACOP_NON_PSD_COVARIANCE = 5,
    ISACOP_ACCURACY_NOT_REACHED = 6,
    ISACOP_QUADRATURE_NOT_CONVERGED = 7,
    ISACOP_IO = 8,
    ISACOP_CHECK_FAILED = 9, /* a validation report contains failed checks */
    ISACOP_INTERNAL = 10
} isacop_status;

typedef enum isacop_method {
    ISACOP_METHOD_ANALYTIC = 0,
    ISACOP_METHOD_MONTE_CARLO = 1
} isacop_method;

typedef enum isacop_report {
    ISACOP_REPORT_USER_OP = 0,   /* gamma sweep, analytic and Monte Carlo */
    ISACOP_REPORT_TARGET_OP = 1, /* epsilon sweep, analytic and Monte Carlo */
    ISACOP_REPORT_TRADEOFF = 2,  /* |b1| or |b2| sweep, analytic */
    ISACOP_REPORT_HISTOGRAM = 3, /* joint histogram of (X, Y) */
    ISACOP_REPORT_VALIDATE = 4   /* bundled self-checks */
} isacop_report;

typedef struct isacop_estimate {
    double value;
    double std_error; /* 0 for analytic results */
    isacop_method method;
} isacop_estimate;

/* Link configuration plus experiment settings. */
typedef struct isacop_experiment isacop_experiment;

ISACOP_API const char* isacop_version(void);
ISACOP_API const char* isacop_status_name(isacop_status status);

/* Message of the last failed call on this thread; "" if none. For
 * configuration errors it starts with the offending key. */
ISACOP_API const char* isacop_last_error(void);

/* Creates an experiment holding the reference configuration. */
ISACOP_API isacop_status isacop_experiment_create(isacop_experiment** out);
ISACOP_API void isacop_experiment_destroy(isacop_experiment* exp);

/* Sets one `key = value` setting, using the configuration file keys. */
ISACOP_API isacop_status isacop_experiment_set(isacop_experiment* exp, const char* key, const char* value);

/* Applies a `key = value` configuration file on top of the current settings. */
ISACOP_API isacop_status isacop_experiment_load(isacop_experiment* exp, const char* path);

ISACOP_API isacop_status isacop_experiment_validate(const isacop_experiment* exp);

/* Output paths configured through the `outputs` key. */
ISACOP_API size_t isacop_experiment_output_count(const isacop_experiment* exp);
ISACOP_API const char* isacop_experiment_output(const isacop_experiment* exp, size_t index);

/* Outage probabilities at the experiment's gamma / epsilon. */
ISACOP_API isacop_status isacop_user_op(const isacop_experiment* exp, isacop_method method, isacop_estimate* out);
ISACOP_API isacop_status isacop_target_op(const isacop_experiment* exp, isacop_method method, isacop_estimate* out);

/* Monte Carlo ergodic rate E[log2(1 + SINR)]. */
ISACOP_API isacop_status isacop_ergodic_rate(const isacop_experiment* exp, isacop_estimate* out);

/* SINR and CRB for one channel at target angle theta: h holds n_tx complex
 * values as interleaved (re, im) pairs. */
ISACOP_API isacop_status isacop_sinr(const isacop_experiment* exp, const double* h, size_t n_tx, double theta, double* out);
ISACOP_API isacop_status isacop_crb(const isacop_experiment* exp, const double* h, size_t n_tx, double theta, double* out);

/* P(G <= x) for G = sum w_i chi'^2(k_i, lambda_i) + s Z + m. */
ISACOP_API isacop_status isacop_gchi2_cdf(const double* weights,
                                          const int* dofs,
                                          const double* noncentralities,
                                          size_t count,
                                          double lin_coeff,
                                          double offset,
                                          double x,
                                          double* out);

/* Runs a study and returns its CSV in *csv, to be released with
 * isacop_free. ISACOP_CHECK_FAILED still sets *csv. */
ISACOP_API isacop_status isacop_run(const isacop_experiment* exp, isacop_report report, char** csv);

/* matplotlib script plotting the CSV of `report` stored at csv_path;
 * release with isacop_free. Not available for ISACOP_REPORT_VALIDATE. */
ISACOP_API isacop_status isacop_plot_script(isacop_report report, const char* csv_path, char** script);

ISACOP_API void isacop_free(void* ptr);

#ifdef __cplusplus
}
#endif

#endif /* ISACOP_ISACOP_H */
