#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "reldiff/common.hpp"
#include "reldiff/grid.hpp"

namespace reldiff {

using ScalarFn = std::function<double(double)>;

/// One diffusion model on momentum space: coefficient functions on
/// r = |p| >= 0 plus dimension and inverse temperature. Immutable after
/// construction; shareable across threads.
///
/// The admissibility requirements checked by check_hypotheses:
///   - sigma(r) >= epsilon everywhere,
///   - g(r) := 2 r b(r) / sigma(r)^2 >= epsilon on the tail window,
///   - exp(-epsilon_prime * r) f(r) -> 0, with epsilon_prime < beta*epsilon/2.
struct CoefficientSet {
    ScalarFn f;      // position coupling dx = f(r) p dt
    ScalarFn b;      // friction
    ScalarFn sigma;  // noise amplitude
    ScalarFn eta;    // anisotropy of the radial noise channel
    int d = 3;
    double beta = 1.0;
    double epsilon = 0.0;        // admissibility floor (0 = not yet populated)
    double epsilon_prime = 0.0;  // decay exponent for the f tail condition
    std::string name;
    std::string builtin;     // builtin id when applicable, else empty
    double tail_start = 0.0;     // default tail window start (0 = r_max/10)
    bool eta_is_zero = false;    // exact: lets the integrator skip the dw draw
    double ou_b = 1.0;           // friction constant of classical_ou

    double g(double r) const {
        double s = sigma(r);
        return 2.0 * r * b(r) / (s * s);
    }
};

enum class HypothesisReason {
    ok,
    sigma_below_floor,
    g_tail_below_floor,
    f_tail_not_vanishing,
};

const char* to_string(HypothesisReason r);

struct GridDescriptor {
    std::string kind;
    std::size_t nodes = 0;
    double r_max = 0.0;
};

/// Result of the admissibility check. epsilon_star is the largest floor that
/// the model supports on the checked grid: min(sigma_min, g_tail_min).
struct HypothesisReport {
    double sigma_min = 0.0;
    double g_tail_min = 0.0;
    double tail_start_r0 = 0.0;
    double tail_end = 0.0;
    bool f_tail_ok = false;
    bool passed = false;
    double epsilon_star = 0.0;
    double epsilon_used = 0.0;        // floor the pass judgment used
    double epsilon_prime_used = 0.0;
    double f_tail_final = 0.0;        // exp(-eps' r) f(r) at the window end
    HypothesisReason reason = HypothesisReason::ok;
    GridDescriptor grid_used;
};

/// Builtin models:
///   - "classical_ou":  f = 1, b = ou_b, sigma = sqrt(2), eta = 0
///   - "roup":          f = b = (1+r^2)^(-1/2), sigma = sqrt(2), eta = 0
///   - "dunkel_hanggi": f = (1+r^2)^(-1/2), b = 1 - (d/beta)(1+r^2)^(-1/2),
///                      sigma = sqrt(2 sqrt(1+r^2)), eta = r
/// epsilon / epsilon_prime are populated from the admissibility check on the
/// default grid ([0, 50], 4096 nodes): epsilon = epsilon_star and
/// epsilon_prime = 0.499 * beta * epsilon (strictly inside the allowed range).
CoefficientSet builtin_model(const std::string& name, int d, double beta,
                             double ou_b = 1.0);

/// Evaluate the admissibility conditions on a grid. The tail window
/// [tail_lo, tail_hi] defaults to [tail_start or r_max/10, r_max]; both
/// endpoints are always included as evaluation points. Requires
/// grid r_max >= 10 * tail_lo. Throws ValidationError when a coefficient
/// evaluates non-finite (the message names the offending r).
HypothesisReport check_hypotheses(const CoefficientSet& coeffs, const RadialGrid& grid,
                                  double tail_lo = -1.0, double tail_hi = -1.0,
                                  double f_tail_tol = 1e-6);

/// Load a model from a JSON file. Either {"builtin": name, "d", "beta", ...}
/// or coefficient expressions {"f", "b", "sigma", "eta"} in the grammar of
/// Expression, plus "d", "beta" and optional "epsilon", "epsilon_prime",
/// "tail_start", "name".
CoefficientSet load_model(const std::string& path);

/// Same, from a JSON string (used by tests).
CoefficientSet load_model_json(const std::string& json_text);

}  // namespace reldiff
