#pragma once

#include <stdexcept>
#include <string>

namespace reldiff {

inline constexpr const char* kVersion = "0.1.0";

/// Input or precondition violation. CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical non-convergence (quadrature, eigensolve, refinement mismatch).
/// CLI maps this to exit code 2.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace reldiff
