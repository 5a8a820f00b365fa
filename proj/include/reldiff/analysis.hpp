#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "reldiff/equilibrium.hpp"
#include "reldiff/model.hpp"
#include "reldiff/tridiag.hpp"

namespace reldiff {

// Finite-difference discretization of the generator restricted to one
// spherical-harmonic sector l: L_l = L_r - (sigma^2 / (2 beta r^2)) l(l+d-2).
// Built in divergence form against the radial equilibrium weight, so the
// mass-scaled matrix `sym` (= -L after the similarity transform by sqrt(mass))
// is exactly symmetric positive semidefinite.
struct RadialOperator {
    std::vector<double> nodes;  // uniform radial grid (DOF locations)
    int sector = 0;
    int d = 1;
    double beta = 1.0;
    std::vector<double> weight;  // radial equilibrium density at the nodes
    std::vector<double> mass;    // lumped quadrature masses, sum = 1
    SymTridiag sym;              // symmetrized -L_l, PSD
    double r_max = 0.0;          // truncation radius actually used
    std::string truncation_note;  // set when the tail was cut for weight underflow

    std::size_t size() const { return nodes.size(); }
    // Action of the (unsymmetrized) generator on nodal values.
    std::vector<double> apply_generator(const std::vector<double>& h) const;
};

// n_nodes is the DOF count; the grid spans [0 or h, r_trunc] uniformly where
// r_trunc cuts the tail once the equilibrium cdf is within 1e-10 of 1.
RadialOperator discretize_generator(const CoefficientSet& coeffs,
                                    const EquilibriumMeasure& measure, int sector,
                                    std::size_t n_nodes = 4096);

struct GapResult {
    double lambda1 = 0.0;  // fine-grid value
    int sector = 0;        // sector attaining the minimum on the fine grid
    double coarse = 0.0;   // 4096-node value
    double fine = 0.0;     // 8192-node value
    bool converged = false;  // |coarse - fine| <= 0.5% of fine
    double lambda_l0 = 0.0;  // fine-grid smallest nonzero eigenvalue, sector 0
    double lambda_l1 = 0.0;  // fine-grid ground eigenvalue, sector 1
};

// Smallest nonzero eigenvalue of -L over sectors l in {0, 1}, with a
// two-resolution agreement check (flagged, not fatal, when it fails).
GapResult spectral_gap(const CoefficientSet& coeffs, const EquilibriumMeasure& measure);

struct SearchBox {
    double c_min = 1e-3;
    double c_max = 1.0;
    int c_steps = 256;
    double r_min = 0.0;
    double r_max = 25.0;
    double r_step = 2.5;
    double eval_r_max = 50.0;     // residuals are verified on [0, eval_r_max]
    std::size_t eval_nodes = 4096;
};

// Drift condition L W <= -alpha W + gamma 1_B(0,R) for the smooth surrogate
// W = exp(c sqrt(delta^2 + r^2)), delta = 1e-3.
struct LyapunovCertificate {
    double c = 0.0;
    double R = 0.0;
    double alpha = 0.0;  // = c eps^3 / 4 exactly
    double gamma = 0.0;
    double worst_residual = 0.0;  // max over grid of L W + alpha W - gamma 1_B
    double ineq4_margin = 0.0;    // min over grid of rearranged-form slack
    double delta = 1e-3;
    double epsilon = 0.0;  // ellipticity floor the certificate was built with
};

// Grid search for the largest admissible exponent c: requires
// (d-1)/R + c <= beta eps / 2 with R at least the hypothesis tail start, and a
// nonpositive residual on the evaluation grid. Throws ConvergenceError quoting
// the constraint when the box holds no admissible pair.
LyapunovCertificate lyapunov_certificate(const CoefficientSet& coeffs,
                                         const SearchBox& box = {});

struct PoincareBound {
    double kappa_R = 0.0;  // local Poincare constant of the ball
    double c2 = 0.0;       // (1/alpha)(1 + 2 beta gamma kappa_R / eps^2)
    double lambda1 = 0.0;  // numerical spectral gap, for the consistency check
    bool consistent = false;  // 1/c2 <= lambda1
};

// kappa_R = (2R)^2/pi^2 (flat constant of the convex ball) inflated by
// exp(osc) of the log Lebesgue-density of the equilibrium over the ball.
// Throws ConvergenceError if the certified rate exceeds the spectral gap,
// which the theory forbids. Pass a precomputed gap to skip the eigensolve.
PoincareBound poincare_constant(const LyapunovCertificate& cert,
                                const CoefficientSet& coeffs,
                                const EquilibriumMeasure& measure,
                                const GapResult* gap = nullptr);

struct DensityFlow {
    std::vector<double> times;
    std::vector<std::vector<double>> densities;  // nodal h at each time
    std::vector<double> nodes;                   // copy of the operator grid
    std::vector<double> mass;                    // copy of the operator masses
};

// Implicit-trapezoid evolution of a rotationally symmetric relative density
// under the sector-0 generator. Mass is conserved by construction; negativity
// beyond -1e-10 rejects the step size with a suggestion. Empty checkpoints
// default to every 0.25 time units plus t_end; t = 0 is always included.
DensityFlow evolve_density(const RadialOperator& op0, std::vector<double> h0,
                           double t_end, double dt,
                           const std::vector<double>& checkpoint_times = {});

// Gaussian bump in the radius, normalized to unit equilibrium mass on the
// operator grid. Convenience initial condition for decay studies.
std::vector<double> gaussian_bump_density(const RadialOperator& op0, double center,
                                          double width);

struct DecayReport {
    std::vector<double> times;
    std::vector<double> l2_distances;
    std::vector<double> tv_distances;
    double fitted_rate_l2 = 0.0;
    double fitted_rate_tv = 0.0;
    bool l2_window_found = false;
    bool tv_window_found = false;
    double bound_rate = 0.0;    // 1/(2 c2) when a certified bound was supplied
    bool bound_checked = false;  // rate floor was asserted against the fit
};

// L2(nu) and L1(nu) distances of h_t to 1, with log-linear rate fits over the
// window where the distance sits in [1e-6, 1e-1] of its initial value. When a
// certified bound is supplied and a window exists, asserts the fitted rates
// stay above 1/(2 c2)(1 - tol) and throws ConvergenceError otherwise.
DecayReport decay_report(const DensityFlow& flow, const PoincareBound* bound = nullptr,
                         double tol = 0.05);

}  // namespace reldiff
