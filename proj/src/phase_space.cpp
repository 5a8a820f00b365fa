#include "reldiff/phase_space.hpp"

namespace reldiff {

PhasePoint make_phase_point(std::vector<double> x, std::vector<double> p,
                            double t, double s) {
    if (x.size() != p.size())
        throw ValidationError("make_phase_point: x and p dimension mismatch");
    for (double c : p)
        if (!std::isfinite(c)) throw ValidationError("make_phase_point: non-finite momentum");
    for (double c : x)
        if (!std::isfinite(c)) throw ValidationError("make_phase_point: non-finite position");
    PhasePoint pt;
    pt.t = t;
    pt.s = s;
    pt.x = std::move(x);
    pt.p = std::move(p);
    pt.p0 = energy(pt.p);
    return pt;
}

PhasePoint rest_state(int d) {
    if (d < 1) throw ValidationError("rest_state: d must be >= 1");
    PhasePoint pt;
    pt.x.assign(static_cast<std::size_t>(d), 0.0);
    pt.p.assign(static_cast<std::size_t>(d), 0.0);
    pt.p0 = 1.0;
    return pt;
}

Lift lift(const std::vector<double>& p) {
    for (double c : p)
        if (!std::isfinite(c)) throw ValidationError("lift: non-finite momentum component");
    Lift out;
    out.p0 = energy(p);
    out.velocity.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out.velocity[i] = p[i] / out.p0;
    return out;
}

Spherical to_spherical(const std::vector<double>& p) {
    Spherical sph;
    sph.r = norm(p);
    sph.theta.assign(p.size(), 0.0);
    if (sph.r > 0.0) {
        sph.degenerate = false;
        for (std::size_t i = 0; i < p.size(); ++i) sph.theta[i] = p[i] / sph.r;
    } else {
        sph.degenerate = true;
        if (!sph.theta.empty()) sph.theta[0] = 1.0;
    }
    return sph;
}

std::vector<double> from_spherical(const Spherical& sph) {
    std::vector<double> p(sph.theta.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = sph.r * sph.theta[i];
    return p;
}

}  // namespace reldiff
