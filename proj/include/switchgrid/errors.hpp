#pragma once

#include <stdexcept>
#include <string>

namespace switchgrid {

// Bad input: malformed config, inconsistent model, invalid grid. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Scheme failure at runtime: CFL violation, divergence, projection not stabilizing.
// CLI exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A verification check ran and failed. CLI exit code 4.
struct VerificationError : std::runtime_error {
    explicit VerificationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace switchgrid
