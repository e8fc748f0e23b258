// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "isacop/isacop.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core_model.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "outage.hpp"
#include "quadform.hpp"

struct isacop_experiment {
    isacop::ExperimentSpec spec;
};

namespace {

thread_local std::string last_error;

isacop_status to_status(isacop::ErrorCode code)
{
    using isacop::ErrorCode;
    switch (code) {
    case ErrorCode::InvalidArgument: return ISACOP_INVALID_ARGUMENT;
    case ErrorCode::InvalidConfig: return ISACOP_INVALID_CONFIG;
    case ErrorCode::DegenerateBeamformer: return ISACOP_DEGENERATE_BEAMFORMER;
    case ErrorCode::SingularFisher: return ISACOP_SINGULAR_FISHER;
    case ErrorCode::NonPSDCovariance: return ISACOP_NON_PSD_COVARIANCE;
    case ErrorCode::AccuracyNotReached: return ISACOP_ACCURACY_NOT_REACHED;
    case ErrorCode::QuadratureNotConverged: return ISACOP_QUADRATURE_NOT_CONVERGED;
    case ErrorCode::Io: return ISACOP_IO;
    }
    return ISACOP_INTERNAL;
}

isacop_status fail(isacop_status status, const char* what)
{
    last_error = what;
    return status;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
isacop_status guarded(Fn&& fn)
{
    try {
        last_error.clear();
        return fn();
    } catch (const isacop::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(ISACOP_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(ISACOP_INTERNAL, e.what());
    } catch (...) {
        return fail(ISACOP_INTERNAL, "unknown error");
    }
}

isacop_estimate to_c(const isacop::Estimate& e)
{
    return {e.value, e.std_error,
            e.method == isacop::Method::Analytic ? ISACOP_METHOD_ANALYTIC : ISACOP_METHOD_MONTE_CARLO};
}

isacop::ChannelRealization channel(const isacop_experiment* exp, const double* h, size_t n_tx, double theta)
{
    if (static_cast<long long>(n_tx) != exp->spec.base.n_tx)
        throw isacop::Error(isacop::ErrorCode::InvalidArgument, "channel length differs from N");
    isacop::ChannelRealization chan;
    chan.h.resize(static_cast<Eigen::Index>(n_tx));
    for (size_t i = 0; i < n_tx; ++i)
        chan.h(static_cast<Eigen::Index>(i)) = {h[2 * i], h[2 * i + 1]};
    chan.theta = theta;
    return chan;
}

const char* command_name(isacop_report report)
{
    switch (report) {
    case ISACOP_REPORT_USER_OP: return "user-op";
    case ISACOP_REPORT_TARGET_OP: return "target-op";
    case ISACOP_REPORT_TRADEOFF: return "tradeoff";
    case ISACOP_REPORT_HISTOGRAM: return "hist";
    case ISACOP_REPORT_VALIDATE: return "validate";
    }
    return "";
}

char* copy_out(const std::string& text)
{
    auto* buffer = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buffer)
        throw std::bad_alloc();
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    return buffer;
}

}  // namespace

#define ISACOP_REQUIRE(cond)                                                      \
    do {                                                                          \
        if (!(cond))                                                              \
            return fail(ISACOP_INVALID_ARGUMENT, "null argument: " #cond);         \
    } while (0)

extern "C" {

const char* isacop_version(void)
{
    return ISACOP_VERSION_STRING;
}

const char* isacop_status_name(isacop_status status)
{
    switch (status) {
    case ISACOP_OK: return "ok";
    case ISACOP_INVALID_ARGUMENT: return "invalid argument";
    case ISACOP_INVALID_CONFIG: return "invalid configuration";
    case ISACOP_DEGENERATE_BEAMFORMER: return "degenerate beamformer";
    case ISACOP_SINGULAR_FISHER: return "singular Fisher information";
    case ISACOP_NON_PSD_COVARIANCE: return "covariance not positive semidefinite";
    case ISACOP_ACCURACY_NOT_REACHED: return "accuracy not reached";
    case ISACOP_QUADRATURE_NOT_CONVERGED: return "quadrature not converged";
    case ISACOP_IO: return "i/o error";
    case ISACOP_CHECK_FAILED: return "check failed";
    case ISACOP_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* isacop_last_error(void)
{
    return last_error.c_str();
}

isacop_status isacop_experiment_create(isacop_experiment** out)
{
    ISACOP_REQUIRE(out);
    return guarded([&] {
        *out = new isacop_experiment{};
        return ISACOP_OK;
    });
}

void isacop_experiment_destroy(isacop_experiment* exp)
{
    delete exp;
}

isacop_status isacop_experiment_set(isacop_experiment* exp, const char* key, const char* value)
{
    ISACOP_REQUIRE(exp && key && value);
    return guarded([&] {
        isacop::apply_setting(exp->spec, key, value);
        return ISACOP_OK;
    });
}

isacop_status isacop_experiment_load(isacop_experiment* exp, const char* path)
{
    ISACOP_REQUIRE(exp && path);
    return guarded([&] {
        auto spec = exp->spec;
        isacop::load_config_file(spec, path);
        exp->spec = std::move(spec);
        return ISACOP_OK;
    });
}

isacop_status isacop_experiment_validate(const isacop_experiment* exp)
{
    ISACOP_REQUIRE(exp);
    return guarded([&] {
        exp->spec.validate();
        return ISACOP_OK;
    });
}

size_t isacop_experiment_output_count(const isacop_experiment* exp)
{
    return exp ? exp->spec.outputs.size() : 0;
}

const char* isacop_experiment_output(const isacop_experiment* exp, size_t index)
{
    if (!exp || index >= exp->spec.outputs.size())
        return nullptr;
    return exp->spec.outputs[index].c_str();
}

isacop_status isacop_user_op(const isacop_experiment* exp, isacop_method method, isacop_estimate* out)
{
    ISACOP_REQUIRE(exp && out);
    return guarded([&] {
        exp->spec.validate();
        auto const q = exp->spec.query();
        *out = to_c(method == ISACOP_METHOD_ANALYTIC ? isacop::user_op_analytic(q) : isacop::user_op_montecarlo(q));
        return ISACOP_OK;
    });
}

isacop_status isacop_target_op(const isacop_experiment* exp, isacop_method method, isacop_estimate* out)
{
    ISACOP_REQUIRE(exp && out);
    return guarded([&] {
        exp->spec.validate();
        auto const q = exp->spec.query();
        *out = to_c(method == ISACOP_METHOD_ANALYTIC ? isacop::target_op_analytic(q) : isacop::target_op_montecarlo(q));
        return ISACOP_OK;
    });
}

isacop_status isacop_ergodic_rate(const isacop_experiment* exp, isacop_estimate* out)
{
    ISACOP_REQUIRE(exp && out);
    return guarded([&] {
        exp->spec.validate();
        *out = to_c(isacop::ergodic_rate_montecarlo(exp->spec.query()));
        return ISACOP_OK;
    });
}

isacop_status isacop_sinr(const isacop_experiment* exp, const double* h, size_t n_tx, double theta, double* out)
{
    ISACOP_REQUIRE(exp && h && out);
    return guarded([&] {
        exp->spec.base.validate();
        *out = isacop::sinr(exp->spec.base, channel(exp, h, n_tx, theta));
        return ISACOP_OK;
    });
}

isacop_status isacop_crb(const isacop_experiment* exp, const double* h, size_t n_tx, double theta, double* out)
{
    ISACOP_REQUIRE(exp && h && out);
    return guarded([&] {
        exp->spec.base.validate();
        *out = isacop::crb_general(exp->spec.base, channel(exp, h, n_tx, theta));
        return ISACOP_OK;
    });
}

isacop_status isacop_gchi2_cdf(const double* weights,
                               const int* dofs,
                               const double* noncentralities,
                               size_t count,
                               double lin_coeff,
                               double offset,
                               double x,
                               double* out)
{
    ISACOP_REQUIRE(out);
    ISACOP_REQUIRE(count == 0 || (weights && dofs && noncentralities));
    return guarded([&] {
        isacop::GChi2Params p;
        p.weights.assign(weights, weights + count);
        p.dofs.assign(dofs, dofs + count);
        p.noncentralities.assign(noncentralities, noncentralities + count);
        p.lin_coeff = lin_coeff;
        p.offset = offset;
        p.validate();
        *out = isacop::gchi2_cdf(p, x);
        return ISACOP_OK;
    });
}

isacop_status isacop_run(const isacop_experiment* exp, isacop_report report, char** csv)
{
    ISACOP_REQUIRE(exp && csv);
    *csv = nullptr;
    return guarded([&] {
        isacop::Table table;
        switch (report) {
        case ISACOP_REPORT_USER_OP: table = isacop::run_user_op_sweep(exp->spec); break;
        case ISACOP_REPORT_TARGET_OP: table = isacop::run_target_op_sweep(exp->spec); break;
        case ISACOP_REPORT_TRADEOFF: table = isacop::run_tradeoff(exp->spec); break;
        case ISACOP_REPORT_HISTOGRAM: table = isacop::run_histogram(exp->spec); break;
        case ISACOP_REPORT_VALIDATE: table = isacop::run_validate(exp->spec); break;
        default: return fail(ISACOP_INVALID_ARGUMENT, "unknown report kind");
        }
        *csv = copy_out(table.to_csv());
        if (table.failures > 0)
            return fail(ISACOP_CHECK_FAILED, "validation report contains failed checks");
        return ISACOP_OK;
    });
}

isacop_status isacop_plot_script(isacop_report report, const char* csv_path, char** script)
{
    ISACOP_REQUIRE(csv_path && script);
    *script = nullptr;
    return guarded([&] {
        *script = copy_out(isacop::plot_script(command_name(report), csv_path));
        return ISACOP_OK;
    });
}

void isacop_free(void* ptr)
{
    std::free(ptr);
}

}  // extern "C"
