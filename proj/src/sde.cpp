#include "reldiff/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>
#include <utility>

#include "reldiff/rng.hpp"

namespace reldiff {

namespace {

// Inlined coefficient kernels for the builtin models. These mirror the
// arithmetic of the std::function coefficients exactly, operation for
// operation, so the fast path and the generic path produce bitwise-identical
// steps (pinned by a unit test).
struct OuKernel {
    double b0;
    double f(double) const { return 1.0; }
    double b(double) const { return b0; }
    double sigma(double) const { return std::sqrt(2.0); }
    double eta(double) const { return 0.0; }
};

struct RoupKernel {
    double f(double r) const { return 1.0 / std::sqrt(1.0 + r * r); }
    double b(double r) const { return 1.0 / std::sqrt(1.0 + r * r); }
    double sigma(double) const { return std::sqrt(2.0); }
    double eta(double) const { return 0.0; }
};

struct DhKernel {
    double ratio;  // d / beta
    double f(double r) const { return 1.0 / std::sqrt(1.0 + r * r); }
    double b(double r) const { return 1.0 - ratio / std::sqrt(1.0 + r * r); }
    double sigma(double r) const { return std::sqrt(2.0 * std::sqrt(1.0 + r * r)); }
    double eta(double r) const { return r; }
};

struct GenericKernel {
    const CoefficientSet* c;
    double f(double r) const { return c->f(r); }
    double b(double r) const { return c->b(r); }
    double sigma(double r) const { return c->sigma(r); }
    double eta(double r) const { return c->eta(r); }
};

template <class F>
decltype(auto) dispatch_model(const CoefficientSet& c, F&& fn) {
    if (c.builtin == "classical_ou") return fn(OuKernel{c.ou_b});
    if (c.builtin == "roup") return fn(RoupKernel{});
    if (c.builtin == "dunkel_hanggi")
        return fn(DhKernel{static_cast<double>(c.d) / c.beta});
    return fn(GenericKernel{&c});
}

// One explicit update of momentum, position, proper time and energy. Leaves
// st.t alone (the caller pins times to avoid accumulated rounding) and leaves
// st entirely untouched when the update turns non-finite.
template <class M>
void advance_one(PhasePoint& st, const M& m, double beta, bool eta_zero, bool track_x,
                 double dt, const double* dW, double dw, std::vector<double>& pnew) {
    const int d = st.dim();
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += st.p[i] * st.p[i];
    const double r = std::sqrt(r2);

    const double bv = m.b(r);
    const double sv = m.sigma(r);
    double amp;
    double ev = 0.0;
    if (eta_zero) {
        amp = sv / std::sqrt(beta);
    } else {
        ev = m.eta(r);
        amp = sv / std::sqrt(beta * (1.0 + ev * ev));
    }

    double pn2 = 0.0;
    if (eta_zero) {
        for (int i = 0; i < d; ++i) {
            const double pi = st.p[i] - bv * st.p[i] * dt + amp * dW[i];
            pnew[static_cast<std::size_t>(i)] = pi;
            pn2 += pi * pi;
        }
    } else {
        const bool degenerate = r < 1e-9;
        const double inv_r = degenerate ? 0.0 : 1.0 / r;
        for (int i = 0; i < d; ++i) {
            // Canonical direction e1 at the degenerate radius, matching the
            // spherical-lift convention.
            const double theta = degenerate ? (i == 0 ? 1.0 : 0.0) : st.p[i] * inv_r;
            const double pi =
                st.p[i] - bv * st.p[i] * dt + amp * (dW[i] + ev * theta * dw);
            pnew[static_cast<std::size_t>(i)] = pi;
            pn2 += pi * pi;
        }
    }
    if (!std::isfinite(pn2)) throw BlowUpError(st, dt);

    for (int i = 0; i < d; ++i) st.p[i] = pnew[static_cast<std::size_t>(i)];
    if (track_x) {
        const double fv = m.f(r);
        // Position advances with the freshly updated momentum; f stays at the
        // pre-step radius.
        for (int i = 0; i < d; ++i) st.x[i] += fv * st.p[i] * dt;
    }
    st.s += dt / std::sqrt(1.0 + r2);
    st.p0 = std::sqrt(1.0 + pn2);
}

// Steps one path through every checkpoint, drawing noise from rng in the
// fixed order (d momentum increments, then the scalar driver when eta is not
// identically zero). Emits the state at each checkpoint; throws BlowUpError
// with the last finite state on a non-finite update.
template <class M, class Emit>
void run_path(PhasePoint& st, const M& m, const CoefficientSet& c, const SimConfig& cfg,
              const std::vector<double>& checkpoints, Rng& rng, bool track_x,
              Emit&& emit) {
    const int d = st.dim();
    std::vector<double> dW(static_cast<std::size_t>(d));
    std::vector<double> scratch(static_cast<std::size_t>(d));
    const double sqrt_dt = std::sqrt(cfg.dt);
    const bool eta_zero = c.eta_is_zero;

    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        const double target = checkpoints[k];
        const double t0 = st.t;
        const auto n_full =
            static_cast<long long>(std::floor((target - t0) / cfg.dt + 1e-9));
        for (long long i = 0; i < n_full; ++i) {
            for (int j = 0; j < d; ++j)
                dW[static_cast<std::size_t>(j)] = rng.normal() * sqrt_dt;
            const double dw = eta_zero ? 0.0 : rng.normal() * sqrt_dt;
            advance_one(st, m, c.beta, eta_zero, track_x, cfg.dt, dW.data(), dw,
                        scratch);
            // Pin the clock to the grid instead of accumulating dt roundoff.
            st.t = t0 + static_cast<double>(i + 1) * cfg.dt;
        }
        const double rem = target - st.t;
        if (rem > 1e-6 * cfg.dt) {
            const double sqrt_rem = std::sqrt(rem);
            for (int j = 0; j < d; ++j)
                dW[static_cast<std::size_t>(j)] = rng.normal() * sqrt_rem;
            const double dw = eta_zero ? 0.0 : rng.normal() * sqrt_rem;
            advance_one(st, m, c.beta, eta_zero, track_x, rem, dW.data(), dw, scratch);
        }
        st.t = target;
        emit(k, st);
    }
}

void write_row(EnsembleSnapshot& snap, std::size_t path, const PhasePoint& st) {
    const std::size_t base = path * static_cast<std::size_t>(snap.d);
    for (int i = 0; i < snap.d; ++i)
        snap.momenta[base + static_cast<std::size_t>(i)] = st.p[i];
    if (snap.has_positions)
        for (int i = 0; i < snap.d; ++i)
            snap.positions[base + static_cast<std::size_t>(i)] = st.x[i];
}

std::string blowup_message(double t, double dt) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Euler-Maruyama update produced a non-finite state at t = %.9g "
                  "(dt = %.3g); retry with a smaller dt",
                  t, dt);
    return buf;
}

}  // namespace

void SimConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("SimConfig: dt must be positive and finite");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw ValidationError("SimConfig: t_end must be positive and finite");
    if (n_paths < 1) throw ValidationError("SimConfig: n_paths must be >= 1");
    double prev = 0.0;
    bool first = true;
    for (double t : checkpoint_times) {
        if (!std::isfinite(t) || t < 0.0 || t > t_end + 1e-12 * std::max(1.0, t_end))
            throw ValidationError("SimConfig: checkpoint times must lie in [0, t_end]");
        if (!first && t < prev)
            throw ValidationError("SimConfig: checkpoint times must be sorted");
        prev = t;
        first = false;
    }
}

std::vector<double> SimConfig::effective_checkpoints() const {
    if (!checkpoint_times.empty()) return checkpoint_times;
    return {t_end};
}

BlowUpError::BlowUpError(PhasePoint pre, double dt)
    : ConvergenceError(blowup_message(pre.t, dt)), pre_(std::move(pre)) {}

PhasePoint em_step(const PhasePoint& state, const CoefficientSet& coeffs, double dt,
                   const NoiseIncrement& noise) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("em_step: dt must be positive and finite");
    if (state.dim() != coeffs.d)
        throw ValidationError("em_step: state dimension does not match the model");
    if (static_cast<int>(noise.dW.size()) != state.dim())
        throw ValidationError("em_step: noise dimension does not match the state");

    PhasePoint out = state;
    std::vector<double> scratch(noise.dW.size());
    dispatch_model(coeffs, [&](const auto& m) {
        advance_one(out, m, coeffs.beta, coeffs.eta_is_zero, true, dt, noise.dW.data(),
                    noise.dw, scratch);
    });
    out.t = state.t + dt;
    return out;
}

Trajectory simulate_trajectory(const PhasePoint& init, const CoefficientSet& coeffs,
                               const SimConfig& cfg) {
    cfg.validate();
    if (init.dim() != coeffs.d)
        throw ValidationError("simulate_trajectory: init dimension does not match the model");
    const auto checkpoints = cfg.effective_checkpoints();
    if (!checkpoints.empty() && checkpoints.front() < init.t - 1e-12)
        throw ValidationError("simulate_trajectory: checkpoint precedes the initial time");

    Trajectory out;
    out.points.reserve(checkpoints.size());
    PhasePoint st = init;
    Rng rng(substream_seed(cfg.seed, 0));
    try {
        dispatch_model(coeffs, [&](const auto& m) {
            run_path(st, m, coeffs, cfg, checkpoints, rng, true,
                     [&](std::size_t, const PhasePoint& at) { out.points.push_back(at); });
        });
        out.last_state = st;
    } catch (const BlowUpError& e) {
        out.truncated = true;
        out.last_state = e.pre_state();
        out.diagnostic = e.what();
    }
    return out;
}

EnsembleResult simulate_ensemble(const std::vector<PhasePoint>& inits,
                                 const CoefficientSet& coeffs, const SimConfig& cfg,
                                 const std::vector<std::uint64_t>& stream_ids,
                                 unsigned n_threads) {
    cfg.validate();
    if (inits.empty()) throw ValidationError("simulate_ensemble: inits must be non-empty");
    if (!stream_ids.empty() && stream_ids.size() != inits.size())
        throw ValidationError(
            "simulate_ensemble: stream_ids must be empty or match inits in size");
    const int d = coeffs.d;
    const auto checkpoints = cfg.effective_checkpoints();
    for (const auto& st : inits) {
        if (st.dim() != d)
            throw ValidationError("simulate_ensemble: init dimension does not match the model");
        if (!checkpoints.empty() && checkpoints.front() < st.t - 1e-12)
            throw ValidationError("simulate_ensemble: checkpoint precedes an initial time");
    }

    const std::size_t n = inits.size();
    EnsembleResult res;
    res.snapshots.resize(checkpoints.size());
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        auto& snap = res.snapshots[k];
        snap.time = checkpoints[k];
        snap.n_paths = n;
        snap.d = d;
        snap.has_positions = cfg.record_positions;
        snap.momenta.assign(n * static_cast<std::size_t>(d), 0.0);
        if (snap.has_positions)
            snap.positions.assign(n * static_cast<std::size_t>(d), 0.0);
    }

    unsigned workers =
        n_threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n_threads;
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, n));

    struct Failure {
        std::size_t path;
        std::string what;
    };
    std::vector<std::vector<Failure>> fails(workers);

    // Each worker owns a contiguous, disjoint block of paths; per-path RNG
    // substreams make the result independent of the worker count.
    auto work = [&](unsigned w, std::size_t lo, std::size_t hi) {
        dispatch_model(coeffs, [&](const auto& m) {
            for (std::size_t idx = lo; idx < hi; ++idx) {
                PhasePoint st = inits[idx];
                const std::uint64_t sid = stream_ids.empty() ? idx : stream_ids[idx];
                Rng rng(substream_seed(cfg.seed, sid));
                std::size_t next_k = 0;
                try {
                    run_path(st, m, coeffs, cfg, checkpoints, rng, cfg.record_positions,
                             [&](std::size_t k, const PhasePoint& at) {
                                 write_row(res.snapshots[k], idx, at);
                                 next_k = k + 1;
                             });
                } catch (const BlowUpError& e) {
                    // Freeze the failed path at its last finite state so the
                    // row stays present and flagged rather than dropped.
                    for (std::size_t k = next_k; k < checkpoints.size(); ++k)
                        write_row(res.snapshots[k], idx, e.pre_state());
                    fails[w].push_back({idx, std::string(e.what())});
                }
            }
        });
    };

    if (workers <= 1) {
        work(0, 0, n);
    } else {
        const std::size_t chunk = (n + workers - 1) / workers;
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = static_cast<std::size_t>(w) * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            threads.emplace_back(work, w, lo, hi);
        }
        for (auto& th : threads) th.join();
    }

    for (const auto& bucket : fails)
        for (const auto& f : bucket) {
            res.failed_paths.push_back(f.path);
            res.failure_diagnostics.push_back(f.what);
        }
    return res;
}

}  // namespace reldiff
