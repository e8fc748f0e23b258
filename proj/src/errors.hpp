// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace isacop {

enum class ErrorCode {
    InvalidArgument,
    InvalidConfig,
    DegenerateBeamformer,
    SingularFisher,
    NonPSDCovariance,
    AccuracyNotReached,
    QuadratureNotConverged,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

//! Raised for bad configuration values; carries the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(ErrorCode::InvalidConfig, key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace isacop
