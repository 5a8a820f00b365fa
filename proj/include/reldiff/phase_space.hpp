#pragma once

#include <cmath>
#include <vector>

#include "reldiff/common.hpp"

namespace reldiff {

/// Full state on the unitary tangent bundle: coordinate time t, position x,
/// energy p0, spatial momentum p, accumulated proper time s. Units m = 1.
/// p0 is always recomputed from p, so p0^2 - |p|^2 = 1 by construction.
struct PhasePoint {
    double t = 0.0;
    double s = 0.0;
    double p0 = 1.0;
    std::vector<double> x;
    std::vector<double> p;

    int dim() const { return static_cast<int>(p.size()); }
};

inline double norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double c : v) acc += c * c;
    return std::sqrt(acc);
}

/// Energy component from the pseudo-norm relation.
inline double energy(const std::vector<double>& p) {
    double rr = 0.0;
    for (double c : p) rr += c * c;
    return std::sqrt(1.0 + rr);
}

/// Build a PhasePoint with p0 derived from p.
PhasePoint make_phase_point(std::vector<double> x, std::vector<double> p,
                            double t = 0.0, double s = 0.0);

/// Rest state at the origin in dimension d.
PhasePoint rest_state(int d);

struct Lift {
    double p0;
    std::vector<double> velocity;  // v = p / p0, |v| < 1
};

/// Lift a spatial momentum to (p0, velocity).
Lift lift(const std::vector<double>& p);

struct Spherical {
    double r;
    std::vector<double> theta;  // unit direction; canonical e1 when degenerate
    bool degenerate;            // true iff r == 0
};

/// Spherical decomposition p = r * theta. At r = 0 the direction is the
/// first canonical basis vector and the degeneracy flag is set.
Spherical to_spherical(const std::vector<double>& p);

std::vector<double> from_spherical(const Spherical& sph);

}  // namespace reldiff
