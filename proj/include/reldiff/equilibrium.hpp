#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "reldiff/grid.hpp"
#include "reldiff/model.hpp"

namespace reldiff {

/// Potential values at one radius:
///   mu(r) = exp( int_1^r drho / (rho (1+eta^2)) )        (mu(1) = 1)
///   G(r)  = int_0^r g(rho) drho                           (G(0) = 0)
///   V(r)  = int_1^r (d-1)/rho * eta^2/(1+eta^2) drho + beta G(r)   (V(1) = beta G(1))
/// U(p) = V(|p|). The identity r^{d-1} e^{-V} = mu^{d-1} e^{-beta G} ties the
/// two density representations together.
struct Potentials {
    double mu;
    double G;
    double V;
};

/// Adaptive quadrature evaluation of the potentials at a single radius.
Potentials potentials(const CoefficientSet& coeffs, double r, double rel_tol = 1e-10);

/// The invariant measure: nu(dp) = Z^{-1} e^{-V(|p|)} / sigma^2(|p|) dp.
/// Its radial marginal has unnormalized density
///   w(r) = mu(r)^{d-1} e^{-beta G(r)} / sigma^2(r)
/// which stays finite at r = 0 (unlike the e^{-V} form when V diverges).
struct EquilibriumMeasure {
    CoefficientSet coeffs;
    RadialGrid grid;
    std::vector<double> mu_vals, G_vals, V_vals;
    std::vector<double> radial_pdf;  // normalized so its grid trapezoid is 1
    std::vector<double> radial_cdf;  // cumulative trapezoid, ends at exactly 1
    double Z = 0.0;      // full R^d normalizer, includes the sphere surface area
    double Z_rad = 0.0;  // radial normalizer of w(r), Simpson-refined

    double r_max() const { return grid.r_max(); }
};

/// Surface area of the unit sphere S^{d-1} (2 for d = 1).
double sphere_surface(int d);

/// Build the measure on a hybrid grid. r_max is extended by factors of 1.5
/// until the unnormalized tail integrand drops below 1e-10 of its maximum;
/// a non-decaying tail raises ConvergenceError (admissibility violation).
EquilibriumMeasure build_measure(const CoefficientSet& coeffs,
                                 std::size_t n_nodes = 4096, double r_max = 50.0);

/// n momenta in R^d, flattened row-major: radius by inverse CDF on the
/// monotone interpolant, direction uniform on the sphere. Deterministic.
std::vector<double> sample_equilibrium(const EquilibriumMeasure& measure,
                                       std::size_t n, std::uint64_t seed);

struct ResidualResult {
    double value;
    double error_estimate;   // Richardson defect of the two-resolution pass
    std::size_t nodes_used;  // finer radial resolution
};

/// integral of (generator applied to testfn) against nu, for a rotationally
/// symmetric testfn given as phi(r) = f(p)| with |p| = r (even extension
/// across 0 is assumed for the finite differences). Derivatives by central
/// differences with step 1e-5 unless d_phi/dd_phi are supplied.
ResidualResult stationarity_residual_radial(
    const EquilibriumMeasure& measure, const std::function<double(double)>& phi,
    const std::function<double(double)>& d_phi = nullptr,
    const std::function<double(double)>& dd_phi = nullptr);

/// Same for a general testfn on R^d (d <= 3): radial quadrature times
/// spherical quadrature, derivatives by central differences (step 1e-3;
/// the second differences would otherwise amplify rounding of testfn
/// values at radii up to r_max past the convergence gate).
ResidualResult stationarity_residual(
    const EquilibriumMeasure& measure,
    const std::function<double(const std::vector<double>&)>& f);

}  // namespace reldiff
