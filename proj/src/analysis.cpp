#include "reldiff/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "reldiff/quadrature.hpp"

namespace reldiff {

namespace {

// Radius at which the equilibrium cdf is within 1e-10 of 1; the operator grid
// stops there because the weight underflows any eigenvalue contribution.
double truncation_radius(const EquilibriumMeasure& measure) {
    const auto& nodes = measure.grid.nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (1.0 - measure.radial_cdf[i] < 1e-10) return nodes[i];
    return measure.r_max();
}

std::string format_note(const char* fmt, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

std::vector<double> RadialOperator::apply_generator(const std::vector<double>& h) const {
    if (h.size() != size())
        throw ValidationError("apply_generator: vector size does not match the grid");
    std::vector<double> y(size());
    for (std::size_t i = 0; i < size(); ++i) y[i] = std::sqrt(mass[i]) * h[i];
    auto z = matvec(sym, y);
    for (std::size_t i = 0; i < size(); ++i) z[i] = -z[i] / std::sqrt(mass[i]);
    return z;
}

RadialOperator discretize_generator(const CoefficientSet& coeffs,
                                    const EquilibriumMeasure& measure, int sector,
                                    std::size_t n_nodes) {
    if (sector < 0) throw ValidationError("discretize_generator: sector must be >= 0");
    if (n_nodes < 16) throw ValidationError("discretize_generator: n_nodes must be >= 16");
    if (coeffs.d != measure.coeffs.d)
        throw ValidationError("discretize_generator: measure dimension does not match the model");

    const int d = coeffs.d;
    const double beta = coeffs.beta;
    const double r_trunc = truncation_radius(measure);

    // The r = 0 node is a degree of freedom only in the even (sector 0) d = 1
    // case, where the weight is positive at the origin. For d >= 2 the weight
    // vanishes at 0, and for sector >= 1 the eigenfunctions do.
    const bool keep_zero = (sector == 0 && d == 1);
    const std::size_t n = n_nodes;
    const double h = keep_zero ? r_trunc / static_cast<double>(n - 1)
                               : r_trunc / static_cast<double>(n);

    // Half-step lattice from 0 to r_trunc carrying nodes and flux midpoints.
    const std::size_t n_pts = keep_zero ? 2 * (n - 1) + 1 : 2 * n + 1;
    std::vector<double> pts(n_pts);
    for (std::size_t j = 0; j < n_pts; ++j) pts[j] = 0.5 * h * static_cast<double>(j);
    pts.back() = r_trunc;
    auto node_at = [&](std::size_t i) { return keep_zero ? 2 * i : 2 * (i + 1); };
    auto mid_at = [&](std::size_t i) { return keep_zero ? 2 * i + 1 : 2 * i + 3; };

    // Unnormalized radial weight w = mu^{d-1} e^{-beta G} / sigma^2 on the
    // lattice. The mu anchor drops out after normalization, so its cumulative
    // integral can start at the first positive lattice point.
    std::vector<double> G =
        cumulative_integral([&](double r) { return coeffs.g(r); }, pts, 1e-10);
    std::vector<double> lnmu(n_pts, 0.0);
    if (d >= 2) {
        std::vector<double> tail_pts(pts.begin() + 1, pts.end());
        auto C = cumulative_integral(
            [&](double rho) {
                const double e = coeffs.eta(rho);
                return 1.0 / (rho * (1.0 + e * e));
            },
            tail_pts, 1e-10);
        for (std::size_t j = 1; j < n_pts; ++j) lnmu[j] = C[j - 1];
    }
    std::vector<double> w(n_pts);
    for (std::size_t j = 0; j < n_pts; ++j) {
        if (j == 0 && d >= 2) {
            w[j] = 0.0;
            continue;
        }
        const double s = coeffs.sigma(pts[j]);
        w[j] = std::exp(static_cast<double>(d - 1) * lnmu[j] - beta * G[j]) / (s * s);
        if (!std::isfinite(w[j]))
            throw ValidationError(format_note(
                "discretize_generator: equilibrium weight non-finite at r = %.9g", pts[j]));
    }

    RadialOperator op;
    op.sector = sector;
    op.d = d;
    op.beta = beta;
    op.r_max = r_trunc;
    if (r_trunc < measure.r_max() - 1e-9)
        op.truncation_note = format_note(
            "tail truncated at r = %.6g where the equilibrium cdf is within 1e-10 of 1",
            r_trunc);

    op.nodes.resize(n);
    op.weight.resize(n);
    op.mass.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        op.nodes[i] = pts[node_at(i)];
        op.weight[i] = w[node_at(i)];
    }

    // Lumped masses: half cells at the boundaries; the first cell of a
    // dropped-zero even grid spans [0, 1.5h] and is integrated on the lattice
    // because the weight varies by an O(1) factor across it.
    for (std::size_t i = 0; i < n; ++i) {
        double cell = h;
        if (i == 0) cell = keep_zero ? 0.5 * h : (sector == 0 ? 1.5 * h : h);
        if (i + 1 == n) cell = 0.5 * h;
        op.mass[i] = op.weight[i] * cell;
    }
    if (!keep_zero && sector == 0) {
        // trapezoid over lattice points {0, h/2, h, 3h/2}
        op.mass[0] = 0.25 * h * (w[0] + 2.0 * w[1] + 2.0 * w[2] + w[3]);
    }

    // Midpoint flux coefficients F = a w / h with a = sigma^2 / (2 beta).
    auto a_of = [&](double r) {
        const double s = coeffs.sigma(r);
        return s * s / (2.0 * beta);
    };
    std::vector<double> flux(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double rm = pts[mid_at(i)];
        flux[i] = a_of(rm) * w[mid_at(i)] / h;
    }
    double ghost_flux = 0.0;
    if (sector >= 1) {
        // Dirichlet value 0 at the origin enters through the half-cell flux.
        const double rm = pts[1];
        ghost_flux = a_of(rm) * w[1] / h;
    }

    const double ll = static_cast<double>(sector) * static_cast<double>(sector + d - 2);
    op.sym.diag.assign(n, 0.0);
    op.sym.off.assign(n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double f_left = i == 0 ? ghost_flux : flux[i - 1];
        const double f_right = i + 1 < n ? flux[i] : 0.0;
        double diag = (f_left + f_right) / op.mass[i];
        if (sector >= 1) {
            const double r = op.nodes[i];
            diag += a_of(r) * ll / (r * r);
        }
        op.sym.diag[i] = diag;
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        op.sym.off[i] = -flux[i] / std::sqrt(op.mass[i] * op.mass[i + 1]);

    // Normalize the reported weight and masses to a probability; the operator
    // entries above are scale invariant.
    double total = 0.0;
    for (double m : op.mass) total += m;
    if (!(total > 0.0))
        throw ValidationError("discretize_generator: weight sums to zero on the grid");
    for (std::size_t i = 0; i < n; ++i) {
        op.mass[i] /= total;
        op.weight[i] /= total;
    }
    return op;
}

namespace {

double sector_gap(const CoefficientSet& coeffs, const EquilibriumMeasure& measure,
                  int sector, std::size_t n_nodes) {
    RadialOperator op = discretize_generator(coeffs, measure, sector, n_nodes);
    if (sector == 0) return smallest_eigenvalues(op.sym, 2)[1];
    return smallest_eigenvalues(op.sym, 1)[0];
}

}  // namespace

GapResult spectral_gap(const CoefficientSet& coeffs, const EquilibriumMeasure& measure) {
    const double c0 = sector_gap(coeffs, measure, 0, 4096);
    const double c1 = sector_gap(coeffs, measure, 1, 4096);
    const double f0 = sector_gap(coeffs, measure, 0, 8192);
    const double f1 = sector_gap(coeffs, measure, 1, 8192);

    GapResult out;
    out.lambda_l0 = f0;
    out.lambda_l1 = f1;
    out.coarse = std::min(c0, c1);
    out.fine = std::min(f0, f1);
    out.lambda1 = out.fine;
    out.sector = f1 <= f0 ? 1 : 0;
    out.converged = std::abs(out.coarse - out.fine) <= 0.005 * std::abs(out.fine);
    return out;
}

LyapunovCertificate lyapunov_certificate(const CoefficientSet& coeffs,
                                         const SearchBox& box) {
    if (!(coeffs.epsilon > 0.0))
        throw ValidationError(
            "lyapunov_certificate: coefficients carry no ellipticity floor; run the "
            "hypothesis check first");
    const int d = coeffs.d;
    const double beta = coeffs.beta;
    const double eps = coeffs.epsilon;
    const double cap = 0.5 * beta * eps;  // budget for (d-1)/R + c
    const double delta = 1e-3;
    const double r0 = coeffs.tail_start > 0.0 ? coeffs.tail_start : 1.0;

    if (!(box.c_min > 0.0) || box.c_steps < 2 || !(box.r_step > 0.0) ||
        box.eval_nodes < 64)
        throw ValidationError("lyapunov_certificate: malformed search box");

    // Precompute the radius-dependent pieces of (L W)/W on the check grid:
    //   (L W)/W = a c [ c r^2/phi^2 + delta^2/phi^3
    //                   + (d-1)/((1+eta^2) phi) - beta g r/phi ]
    // with phi = sqrt(delta^2 + r^2). All terms are regular at r = 0.
    const std::size_t n = box.eval_nodes;
    std::vector<double> r(n), av(n), t_quad(n), t_curv(n), t_ang(n), t_fric(n), phi(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = box.eval_r_max * static_cast<double>(i) / static_cast<double>(n - 1);
        phi[i] = std::sqrt(delta * delta + r[i] * r[i]);
        const double s = coeffs.sigma(r[i]);
        const double e = coeffs.eta(r[i]);
        av[i] = s * s / (2.0 * beta);
        t_quad[i] = r[i] * r[i] / (phi[i] * phi[i]);
        t_curv[i] = delta * delta / (phi[i] * phi[i] * phi[i]);
        t_ang[i] = static_cast<double>(d - 1) / ((1.0 + e * e) * phi[i]);
        t_fric[i] = beta * coeffs.g(r[i]) * r[i] / phi[i];
    }

    const double c_cap = std::min(box.c_max, cap * (1.0 - 1e-9));
    if (c_cap < box.c_min)
        throw ConvergenceError(
            "lyapunov_certificate: no admissible exponent in the box; the constraint "
            "(d-1)/R + c <= beta*eps/2 leaves no room");

    std::vector<double> raw(n);
    for (int k = box.c_steps - 1; k >= 0; --k) {
        const double c = box.c_min + (c_cap - box.c_min) * static_cast<double>(k) /
                                         static_cast<double>(box.c_steps - 1);
        const double alpha = c * eps * eps * eps / 4.0;
        double r_need = 0.0;
        if (d > 1) {
            if (!(cap - c > 0.0)) continue;
            r_need = (d - 1) / (cap - c) * (1.0 + 1e-9);
        }
        const double r_lo = std::max({r0, box.r_min, r_need, 1e-6});
        if (r_lo > box.r_max * (1.0 + 1e-12)) continue;

        // raw_i = L W + alpha W at node i
        for (std::size_t i = 0; i < n; ++i) {
            const double lw_over_w =
                av[i] * c * (c * t_quad[i] + t_curv[i] + t_ang[i] - t_fric[i]);
            raw[i] = std::exp(c * phi[i]) * (lw_over_w + alpha);
        }

        for (double R = r_lo; R <= box.r_max * (1.0 + 1e-12); R += box.r_step) {
            double ball_max = -std::numeric_limits<double>::infinity();
            double out_max = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                if (r[i] <= R)
                    ball_max = std::max(ball_max, raw[i]);
                else
                    out_max = std::max(out_max, raw[i]);
            }
            const double gamma = std::max(0.0, ball_max);
            const double worst = std::max(ball_max - gamma, out_max);
            if (worst <= 0.0) {
                LyapunovCertificate cert;
                cert.c = c;
                cert.R = R;
                cert.alpha = alpha;
                cert.gamma = gamma;
                cert.worst_residual = worst;
                cert.delta = delta;
                cert.epsilon = eps;
                // Rearranged drift inequality: 1 <= -(1/alpha) (L W)/W
                //                                + (gamma/alpha) (1/W) on the ball.
                // The slack (rhs - 1) equals (gamma 1_B - raw) / (alpha W);
                // computing it from the same raw values keeps the two forms
                // consistent in floating point (gamma majorizes raw exactly).
                double margin = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < n; ++i) {
                    const double W = std::exp(c * phi[i]);
                    const double ball = r[i] <= R ? gamma : 0.0;
                    margin = std::min(margin, (ball - raw[i]) / (alpha * W));
                }
                cert.ineq4_margin = margin;
                return cert;
            }
        }
    }
    throw ConvergenceError(
        "lyapunov_certificate: no (c, R) in the search box gives a nonpositive drift "
        "residual under (d-1)/R + c <= beta*eps/2 with R >= tail start");
}

PoincareBound poincare_constant(const LyapunovCertificate& cert,
                                const CoefficientSet& coeffs,
                                const EquilibriumMeasure& measure, const GapResult* gap) {
    if (!(cert.worst_residual <= 0.0) || !(cert.alpha > 0.0) || !(cert.R > 0.0))
        throw ValidationError("poincare_constant: certificate is not verified");

    // Oscillation over the ball of the log Lebesgue-density of the
    // equilibrium, log(e^{-V}/sigma^2); additive anchors cancel in the
    // oscillation, so both integrals may start wherever convenient.
    const std::size_t n_osc = 2049;
    std::vector<double> pts(n_osc);
    for (std::size_t i = 0; i < n_osc; ++i)
        pts[i] = cert.R * static_cast<double>(i) / static_cast<double>(n_osc - 1);
    std::vector<double> G =
        cumulative_integral([&](double r) { return coeffs.g(r); }, pts, 1e-10);
    std::vector<double> ang(n_osc, 0.0);
    if (coeffs.d >= 2 && !coeffs.eta_is_zero) {
        ang = cumulative_integral(
            [&](double rho) {
                if (rho == 0.0) return 0.0;
                const double e = coeffs.eta(rho);
                return static_cast<double>(coeffs.d - 1) * e * e /
                       (rho * (1.0 + e * e));
            },
            pts, 1e-8);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n_osc; ++i) {
        const double v =
            -(ang[i] + coeffs.beta * G[i]) - 2.0 * std::log(coeffs.sigma(pts[i]));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double osc = hi - lo;

    PoincareBound out;
    const double diam = 2.0 * cert.R;
    out.kappa_R = diam * diam / (std::numbers::pi * std::numbers::pi) * std::exp(osc);
    if (!std::isfinite(out.kappa_R))
        throw ConvergenceError(
            "poincare_constant: density oscillation overflows the perturbation bound; "
            "use a smaller ball");
    out.c2 = (1.0 / cert.alpha) *
             (1.0 + 2.0 * coeffs.beta * cert.gamma * out.kappa_R /
                        (cert.epsilon * cert.epsilon));

    GapResult local;
    if (gap == nullptr) {
        local = spectral_gap(coeffs, measure);
        gap = &local;
    }
    out.lambda1 = gap->lambda1;
    out.consistent = 1.0 / out.c2 <= out.lambda1;
    if (1.0 / out.c2 > out.lambda1 * (1.0 + 1e-6))
        throw ConvergenceError(
            "poincare_constant: certified rate 1/c2 exceeds the measured spectral gap, "
            "which the bound forbids");
    return out;
}

DensityFlow evolve_density(const RadialOperator& op0, std::vector<double> h0,
                           double t_end, double dt,
                           const std::vector<double>& checkpoint_times) {
    if (op0.sector != 0)
        throw ValidationError("evolve_density: operator must be the sector-0 generator");
    const std::size_t n = op0.size();
    if (h0.size() != n)
        throw ValidationError("evolve_density: h0 size does not match the operator grid");
    if (!(dt > 0.0) || !std::isfinite(dt) || !(t_end > 0.0) || !std::isfinite(t_end))
        throw ValidationError("evolve_density: dt and t_end must be positive and finite");

    double mass0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(h0[i]) || h0[i] < 0.0)
            throw ValidationError("evolve_density: h0 must be finite and nonnegative");
        mass0 += op0.mass[i] * h0[i];
    }
    if (std::abs(mass0 - 1.0) > 1e-8)
        throw ValidationError(format_note(
            "evolve_density: h0 must have unit equilibrium mass (got 1 %+.3e)",
            mass0 - 1.0));

    std::vector<double> checks;
    if (checkpoint_times.empty()) {
        for (double t = 0.0; t < t_end - 1e-12; t += 0.25) checks.push_back(t);
        checks.push_back(t_end);
    } else {
        checks = checkpoint_times;
        double prev = -1.0;
        for (double t : checks) {
            if (!std::isfinite(t) || t < 0.0 || t > t_end + 1e-9)
                throw ValidationError("evolve_density: checkpoints must lie in [0, t_end]");
            if (t < prev) throw ValidationError("evolve_density: checkpoints must be sorted");
            prev = t;
        }
        if (checks.front() > 0.0) checks.insert(checks.begin(), 0.0);
    }

    std::vector<double> sqm(n);
    for (std::size_t i = 0; i < n; ++i) sqm[i] = std::sqrt(op0.mass[i]);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = sqm[i] * h0[i];

    // Implicit trapezoid in the mass-scaled basis:
    // (I + dt/2 H) y' = (I - dt/2 H) y with H the symmetrized -L (PSD), so the
    // step is unconditionally stable and exactly conserves <sqrt(m), y>.
    auto make_lhs = [&](double step) {
        SymTridiag A;
        A.diag.resize(n);
        A.off.resize(n - 1);
        for (std::size_t i = 0; i < n; ++i) A.diag[i] = 1.0 + 0.5 * step * op0.sym.diag[i];
        for (std::size_t i = 0; i + 1 < n; ++i) A.off[i] = 0.5 * step * op0.sym.off[i];
        return A;
    };
    const SymTridiag lhs = make_lhs(dt);

    auto advance = [&](double step, const SymTridiag& A) {
        auto Hy = matvec(op0.sym, y);
        for (std::size_t i = 0; i < n; ++i) Hy[i] = y[i] - 0.5 * step * Hy[i];
        y = thomas_solve(A, std::move(Hy));
        double min_h = 0.0;
        for (std::size_t i = 0; i < n; ++i) min_h = std::min(min_h, y[i] / sqm[i]);
        if (min_h < -1e-10)
            throw ConvergenceError(format_note(
                "evolve_density: oscillatory negativity beyond tolerance; the time step "
                "is too large for this grid, retry with dt <= %.3g",
                dt / 4.0));
    };

    DensityFlow flow;
    flow.nodes = op0.nodes;
    flow.mass = op0.mass;
    flow.times.reserve(checks.size());
    flow.densities.reserve(checks.size());

    double t = 0.0;
    for (double target : checks) {
        const double t0 = t;
        const auto n_full = static_cast<long long>(std::floor((target - t0) / dt + 1e-9));
        for (long long k = 0; k < n_full; ++k) {
            advance(dt, lhs);
            t = t0 + static_cast<double>(k + 1) * dt;
        }
        const double rem = target - t;
        if (rem > 1e-6 * dt) advance(rem, make_lhs(rem));
        t = target;
        flow.times.push_back(t);
        std::vector<double> h(n);
        for (std::size_t i = 0; i < n; ++i) h[i] = y[i] / sqm[i];
        flow.densities.push_back(std::move(h));
    }
    return flow;
}

std::vector<double> gaussian_bump_density(const RadialOperator& op0, double center,
                                          double width) {
    if (!(width > 0.0) || !std::isfinite(center))
        throw ValidationError("gaussian_bump_density: invalid bump parameters");
    const std::size_t n = op0.size();
    std::vector<double> h(n);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = (op0.nodes[i] - center) / width;
        h[i] = std::exp(-z * z);
        mass += op0.mass[i] * h[i];
    }
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw ValidationError("gaussian_bump_density: bump carries no mass on the grid");
    for (double& v : h) v /= mass;
    return h;
}

namespace {

struct RateFit {
    double rate = 0.0;
    bool found = false;
};

RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& dist) {
    RateFit out;
    if (dist.empty()) return out;
    const double d0 = dist[0];
    if (!(d0 > 0.0)) return out;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        if (!(dist[k] > 1e-6 * d0) || !(dist[k] <= 1e-1 * d0)) continue;
        const double t = times[k];
        const double y = std::log(dist[k]);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++count;
    }
    if (count < 3) return out;
    const double nf = static_cast<double>(count);
    const double denom = nf * stt - st * st;
    if (!(denom > 0.0)) return out;
    const double slope = (nf * sty - st * sy) / denom;
    if (!std::isfinite(slope)) return out;
    out.rate = -slope;
    out.found = true;
    return out;
}

}  // namespace

DecayReport decay_report(const DensityFlow& flow, const PoincareBound* bound,
                         double tol) {
    const std::size_t K = flow.times.size();
    if (K < 5)
        throw ValidationError("decay_report: need at least 5 checkpoints");
    if (flow.densities.size() != K)
        throw ValidationError("decay_report: malformed flow");

    const std::size_t n = flow.mass.size();
    double total = 0.0;
    for (double m : flow.mass) total += m;
    if (!(total > 0.0)) throw ValidationError("decay_report: empty mass vector");

    DecayReport out;
    out.times = flow.times;
    out.l2_distances.resize(K);
    out.tv_distances.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto& h = flow.densities[k];
        if (h.size() != n) throw ValidationError("decay_report: malformed flow");
        double sq = 0.0, ab = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dlt = h[i] - 1.0;
            sq += flow.mass[i] * dlt * dlt;
            ab += flow.mass[i] * std::abs(dlt);
        }
        out.l2_distances[k] = std::sqrt(sq / total);
        out.tv_distances[k] = ab / total;
    }

    const RateFit l2 = fit_rate(out.times, out.l2_distances);
    const RateFit tv = fit_rate(out.times, out.tv_distances);
    out.fitted_rate_l2 = l2.rate;
    out.fitted_rate_tv = tv.rate;
    out.l2_window_found = l2.found;
    out.tv_window_found = tv.found;

    if (bound != nullptr && bound->c2 > 0.0) {
        out.bound_rate = 1.0 / (2.0 * bound->c2);
        if (l2.found || tv.found) {
            out.bound_checked = true;
            if (l2.found && out.fitted_rate_l2 < out.bound_rate * (1.0 - tol))
                throw ConvergenceError(
                    "decay_report: fitted L2 rate falls below the certified floor "
                    "1/(2 c2)");
            if (tv.found && out.fitted_rate_tv < out.bound_rate * (1.0 - tol))
                throw ConvergenceError(
                    "decay_report: fitted TV rate falls below the certified floor "
                    "1/(2 c2)");
        }
    }
    return out;
}

}  // namespace reldiff
