#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "reldiff/common.hpp"
#include "reldiff/model.hpp"
#include "reldiff/phase_space.hpp"

namespace reldiff {

// One step's worth of Brownian increments: dW has the momentum dimension and
// each component carries variance dt, dw is the extra scalar driver that only
// matters when eta is not identically zero.
struct NoiseIncrement {
    std::vector<double> dW;
    double dw = 0.0;
};

struct SimConfig {
    double dt = 1e-3;
    double t_end = 50.0;
    std::uint64_t seed = 0;
    int n_paths = 1;
    // Sorted, within [0, t_end]. Empty means a single checkpoint at t_end.
    std::vector<double> checkpoint_times;
    bool record_positions = false;

    void validate() const;
    std::vector<double> effective_checkpoints() const;
};

// A single Euler-Maruyama update produced a non-finite state; carries the last
// finite state so callers can truncate instead of losing the whole run.
class BlowUpError : public ConvergenceError {
public:
    BlowUpError(PhasePoint pre, double dt);
    const PhasePoint& pre_state() const { return pre_; }

private:
    PhasePoint pre_;
};

// Explicit Euler-Maruyama update of the full state. All coefficients are
// evaluated at the pre-step momentum radius (Ito convention); the position
// then advances with the freshly updated momentum, p0 is recomputed, and
// proper time accrues as dt / sqrt(1 + r^2) at the pre-step radius.
PhasePoint em_step(const PhasePoint& state, const CoefficientSet& coeffs, double dt,
                   const NoiseIncrement& noise);

struct Trajectory {
    std::vector<PhasePoint> points;  // one entry per checkpoint reached
    PhasePoint last_state;           // final state; pre-step state if truncated
    bool truncated = false;
    std::string diagnostic;
};

// Deterministic for a fixed cfg.seed: the path consumes the substream derived
// from (seed, 0), matching path 0 of an ensemble with default stream ids.
Trajectory simulate_trajectory(const PhasePoint& init, const CoefficientSet& coeffs,
                               const SimConfig& cfg);

struct EnsembleSnapshot {
    double time = 0.0;
    std::size_t n_paths = 0;
    int d = 0;
    bool has_positions = false;
    std::vector<double> momenta;    // row-major, n_paths rows of d entries
    std::vector<double> positions;  // same layout, filled when has_positions

    double p(std::size_t path, int i) const {
        return momenta[path * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
    }
    double x(std::size_t path, int i) const {
        return positions[path * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
    }
};

struct EnsembleResult {
    std::vector<EnsembleSnapshot> snapshots;
    // Paths whose update blew up, frozen at their last finite state from that
    // time onward. Sorted; diagnostics are parallel to the indices.
    std::vector<std::size_t> failed_paths;
    std::vector<std::string> failure_diagnostics;
};

// Each path owns the RNG substream derived from (cfg.seed, stream id); with
// the default empty stream_ids the id is the path index. Outputs depend only
// on (inits, coeffs, cfg, stream_ids), never on n_threads (0 = auto).
EnsembleResult simulate_ensemble(const std::vector<PhasePoint>& inits,
                                 const CoefficientSet& coeffs, const SimConfig& cfg,
                                 const std::vector<std::uint64_t>& stream_ids = {},
                                 unsigned n_threads = 0);

}  // namespace reldiff
