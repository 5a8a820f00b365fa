#pragma once

#include <functional>
#include <vector>

#include "reldiff/common.hpp"

namespace reldiff {

/// Adaptive composite-trapezoid integration with Richardson extrapolation
/// (Romberg). Splits the interval recursively where the extrapolation stalls.
/// Throws ConvergenceError when the requested tolerance cannot be reached and
/// ValidationError when the integrand evaluates non-finite.
double integrate(const std::function<double(double)>& fn, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-14);

/// Cumulative integral along a node sequence: out[j] = integral from nodes[0]
/// to nodes[j] (out[0] = 0). Each sub-interval is integrated adaptively.
std::vector<double> cumulative_integral(const std::function<double(double)>& fn,
                                        const std::vector<double>& nodes,
                                        double rel_tol = 1e-10);

/// Composite trapezoid of tabulated values on a (possibly non-uniform) grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

/// Cumulative trapezoid; out[0] = 0, out[j] = trapezoid over x[0..j].
std::vector<double> cumulative_trapezoid(const std::vector<double>& x,
                                         const std::vector<double>& y);

}  // namespace reldiff
