#include "reldiff/quadrature.hpp"

#include <cmath>
#include <cstdio>

namespace reldiff {
namespace {

constexpr int kMaxRombergLevels = 14;   // up to 2^13 panels per sub-interval
constexpr int kMaxSplitDepth = 24;

struct RombergResult {
    double value;
    double error;
    bool converged;
};

double eval_checked(const std::function<double(double)>& fn, double x) {
    double v = fn(x);
    if (!std::isfinite(v)) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "integrand non-finite at r = %.17g", x);
        throw ValidationError(buf);
    }
    return v;
}

RombergResult romberg(const std::function<double(double)>& fn, double a, double b,
                      double rel_tol, double abs_tol) {
    double table[kMaxRombergLevels] = {0.0};
    double h = b - a;
    table[0] = 0.5 * h * (eval_checked(fn, a) + eval_checked(fn, b));
    double prev_diag = table[0];
    std::size_t n = 1;
    for (int k = 1; k < kMaxRombergLevels; ++k) {
        h *= 0.5;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sum += eval_checked(fn, a + (2.0 * static_cast<double>(i) + 1.0) * h);
        n *= 2;
        double row_prev = table[0];
        table[0] = 0.5 * table[0] + h * sum;
        double pow4 = 1.0;
        for (int j = 1; j <= k; ++j) {
            pow4 *= 4.0;
            double tmp = table[j];
            table[j] = table[j - 1] + (table[j - 1] - row_prev) / (pow4 - 1.0);
            row_prev = tmp;
        }
        double diag = table[k];
        double err = std::abs(diag - prev_diag);
        if (k >= 3 && err <= std::max(rel_tol * std::abs(diag), abs_tol))
            return {diag, err, true};
        prev_diag = diag;
    }
    return {prev_diag, std::abs(prev_diag) * rel_tol * 1e3, false};
}

double integrate_rec(const std::function<double(double)>& fn, double a, double b,
                     double rel_tol, double abs_tol, int depth) {
    RombergResult r = romberg(fn, a, b, rel_tol, abs_tol);
    if (r.converged) return r.value;
    if (depth >= kMaxSplitDepth) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "quadrature non-convergence on [%.6g, %.6g], achieved tolerance %.3g",
                      a, b, r.error);
        throw ConvergenceError(buf);
    }
    double mid = 0.5 * (a + b);
    return integrate_rec(fn, a, mid, rel_tol, 0.5 * abs_tol, depth + 1) +
           integrate_rec(fn, mid, b, rel_tol, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& fn, double a, double b,
                 double rel_tol, double abs_tol) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    return sign * integrate_rec(fn, a, b, rel_tol, abs_tol, 0);
}

std::vector<double> cumulative_integral(const std::function<double(double)>& fn,
                                        const std::vector<double>& nodes,
                                        double rel_tol) {
    std::vector<double> out(nodes.size(), 0.0);
    double acc = 0.0;
    for (std::size_t j = 1; j < nodes.size(); ++j) {
        acc += integrate(fn, nodes[j - 1], nodes[j], rel_tol);
        out[j] = acc;
    }
    return out;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("trapezoid: mismatched or too-short arrays");
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return acc;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& x,
                                         const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("cumulative_trapezoid: mismatched or too-short arrays");
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return out;
}

}  // namespace reldiff
