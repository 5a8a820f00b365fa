#pragma once

#include <cstddef>
#include <vector>

namespace reldiff {

// Symmetric tridiagonal matrix: diag holds n entries, off the n-1 couplings.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;
    std::size_t size() const { return diag.size(); }
};

// Matrix-vector product.
std::vector<double> matvec(const SymTridiag& m, const std::vector<double>& v);

// Number of eigenvalues strictly below x, via the Sturm sequence of the
// shifted LDL^T factorization.
std::size_t eigenvalues_below(const SymTridiag& m, double x);

// The k smallest eigenvalues in ascending order, each located by bisection
// inside the Gershgorin bracket. tol is the absolute width of the final
// bracket (relative for large magnitudes).
std::vector<double> smallest_eigenvalues(const SymTridiag& m, std::size_t k,
                                         double tol = 1e-10);

// Solves m y = rhs by the Thomas algorithm. The factorization has no
// pivoting, which is exact for the diagonally dominant systems used here.
std::vector<double> thomas_solve(const SymTridiag& m, std::vector<double> rhs);

}  // namespace reldiff
