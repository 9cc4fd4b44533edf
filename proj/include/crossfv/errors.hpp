#pragma once
#include <stdexcept>
#include <string>

namespace crossfv {

/// Raised for malformed or inconsistent scenario input. CLI exit code 2.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a run cannot continue (step size collapse, non-convergence,
/// non-finite values). CLI exit code 3.
struct numerics_error : std::runtime_error {
    explicit numerics_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace crossfv
