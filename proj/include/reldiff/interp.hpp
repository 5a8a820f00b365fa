#pragma once

#include <vector>

#include "reldiff/common.hpp"

namespace reldiff {

/// Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).
/// Preserves monotonicity of the data; no overshoot between nodes.
class PchipCurve {
public:
    PchipCurve(std::vector<double> x, std::vector<double> y);

    double operator()(double xq) const;
    double derivative(double xq) const;

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

private:
    std::vector<double> x_, y_, m_;  // nodes, values, node slopes
    std::size_t find_interval(double xq) const;
};

/// Inverse of a tabulated nondecreasing CDF via the monotone interpolant.
/// Evaluation solves F(r) = u per query with a safeguarded Newton iteration.
class InverseCdf {
public:
    /// x: abscissae; cdf: nondecreasing from 0 to 1 on x.
    InverseCdf(std::vector<double> x, std::vector<double> cdf);

    double operator()(double u) const;  // u in [0, 1]

private:
    PchipCurve curve_;
};

}  // namespace reldiff
