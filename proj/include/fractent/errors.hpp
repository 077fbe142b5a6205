#pragma once

#include <stdexcept>
#include <string>

namespace fractent {

// Bad user-facing configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Request exceeds a memory/size budget.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: non-convergence, invalid density matrix, ... (CLI exit code 3).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Assembled state cancelled to numerical zero; signals restriction-violating input.
struct CancellationError : NumericalError {
    explicit CancellationError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace fractent
