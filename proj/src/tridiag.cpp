#include "reldiff/tridiag.hpp"

#include <algorithm>
#include <cmath>

#include "reldiff/common.hpp"

namespace reldiff {

std::vector<double> matvec(const SymTridiag& m, const std::vector<double>& v) {
    const std::size_t n = m.size();
    if (v.size() != n) throw ValidationError("matvec: vector size does not match matrix");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = m.diag[i] * v[i];
        if (i > 0) acc += m.off[i - 1] * v[i - 1];
        if (i + 1 < n) acc += m.off[i] * v[i + 1];
        out[i] = acc;
    }
    return out;
}

std::size_t eigenvalues_below(const SymTridiag& m, double x) {
    const std::size_t n = m.size();
    if (m.off.size() + 1 != n && n != 0)
        throw ValidationError("eigenvalues_below: off size must be diag size - 1");
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sub = i == 0 ? 0.0 : m.off[i - 1] * m.off[i - 1] / d;
        d = (m.diag[i] - x) - sub;
        // Keep the pivot away from zero so the recurrence never divides by 0;
        // the sign convention counts an exact hit as "below".
        if (std::abs(d) < 1e-300) d = -1e-300;
        if (d < 0.0) ++count;
    }
    return count;
}

std::vector<double> smallest_eigenvalues(const SymTridiag& m, std::size_t k, double tol) {
    const std::size_t n = m.size();
    if (k > n) throw ValidationError("smallest_eigenvalues: k exceeds matrix size");
    if (!(tol > 0.0)) throw ValidationError("smallest_eigenvalues: tol must be positive");

    double lo0 = m.diag.empty() ? 0.0 : m.diag[0];
    double hi0 = lo0;
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(m.off[i - 1]);
        if (i + 1 < n) radius += std::abs(m.off[i]);
        lo0 = std::min(lo0, m.diag[i] - radius);
        hi0 = std::max(hi0, m.diag[i] + radius);
    }

    std::vector<double> out;
    out.reserve(k);
    double lo_start = lo0;
    for (std::size_t j = 0; j < k; ++j) {
        // Eigenvalues come out ascending, so the previous one bounds below.
        double lo = lo_start;
        double hi = hi0;
        for (int iter = 0; iter < 200; ++iter) {
            const double width = hi - lo;
            if (width <= tol * std::max(1.0, std::max(std::abs(lo), std::abs(hi))))
                break;
            const double mid = 0.5 * (lo + hi);
            if (eigenvalues_below(m, mid) >= j + 1)
                hi = mid;
            else
                lo = mid;
        }
        const double lambda = 0.5 * (lo + hi);
        out.push_back(lambda);
        lo_start = lo;
    }
    return out;
}

std::vector<double> thomas_solve(const SymTridiag& m, std::vector<double> rhs) {
    const std::size_t n = m.size();
    if (rhs.size() != n)
        throw ValidationError("thomas_solve: rhs size does not match matrix");
    if (n == 0) return rhs;

    std::vector<double> c(n > 1 ? n - 1 : 0);
    double piv = m.diag[0];
    if (piv == 0.0) throw ConvergenceError("thomas_solve: zero pivot");
    if (n > 1) c[0] = m.off[0] / piv;
    rhs[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = m.diag[i] - m.off[i - 1] * c[i - 1];
        if (piv == 0.0) throw ConvergenceError("thomas_solve: zero pivot");
        if (i + 1 < n) c[i] = m.off[i] / piv;
        rhs[i] = (rhs[i] - m.off[i - 1] * rhs[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
}

}  // namespace reldiff
