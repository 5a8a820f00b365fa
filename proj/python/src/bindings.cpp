// Python veneer over the C++ core. Thin by design: every function defers to
// the library and converts results to plain dicts / lists, so the numerics
// have exactly one implementation.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "reldiff/analysis.hpp"
#include "reldiff/common.hpp"
#include "reldiff/equilibrium.hpp"
#include "reldiff/grid.hpp"
#include "reldiff/model.hpp"
#include "reldiff/phase_space.hpp"
#include "reldiff/sde.hpp"

namespace py = pybind11;
using namespace reldiff;

namespace {

RadialGrid check_grid(const CoefficientSet& c, std::size_t n_nodes, double r_max) {
    auto grid = make_hybrid_grid(n_nodes, r_max);
    if (c.tail_start > 0.0 && c.tail_start < r_max) insert_node(grid, c.tail_start);
    return grid;
}

py::dict report_dict(const HypothesisReport& rep) {
    py::dict out;
    out["passed"] = rep.passed;
    out["reason"] = std::string(to_string(rep.reason));
    out["sigma_min"] = rep.sigma_min;
    out["g_tail_min"] = rep.g_tail_min;
    out["tail_start"] = rep.tail_start_r0;
    out["tail_end"] = rep.tail_end;
    out["f_tail_ok"] = rep.f_tail_ok;
    out["f_tail_final"] = rep.f_tail_final;
    out["epsilon_star"] = rep.epsilon_star;
    out["epsilon_used"] = rep.epsilon_used;
    out["epsilon_prime_used"] = rep.epsilon_prime_used;
    py::dict grid;
    grid["kind"] = rep.grid_used.kind;
    grid["nodes"] = rep.grid_used.nodes;
    grid["r_max"] = rep.grid_used.r_max;
    out["grid"] = grid;
    return out;
}

// Expression models may arrive without a floor; resolve it the same way the
// command line tool does before building certificates.
CoefficientSet resolved(const CoefficientSet& c) {
    if (c.epsilon > 0.0) return c;
    auto rep = check_hypotheses(c, check_grid(c, 4096, 50.0));
    if (!rep.passed)
        throw ValidationError("model fails the admissibility check: " +
                              std::string(to_string(rep.reason)));
    CoefficientSet out = c;
    out.epsilon = rep.epsilon_star;
    out.epsilon_prime = 0.499 * out.beta * out.epsilon;
    return out;
}

std::vector<std::vector<double>> reshape(const std::vector<double>& flat, int d) {
    std::vector<std::vector<double>> rows(flat.size() / static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(i) * d,
                       flat.begin() + static_cast<std::ptrdiff_t>(i + 1) * d);
    return rows;
}

py::dict snapshot_dict(const EnsembleSnapshot& s) {
    py::dict out;
    out["time"] = s.time;
    out["momenta"] = reshape(s.momenta, s.d);
    if (s.has_positions) out["positions"] = reshape(s.positions, s.d);
    return out;
}

py::dict gap_dict(const GapResult& g) {
    py::dict out;
    out["lambda1"] = g.lambda1;
    out["sector"] = g.sector;
    out["coarse"] = g.coarse;
    out["fine"] = g.fine;
    out["converged"] = g.converged;
    out["lambda_l0"] = g.lambda_l0;
    out["lambda_l1"] = g.lambda_l1;
    return out;
}

py::dict cert_dict(const LyapunovCertificate& cert) {
    py::dict out;
    out["c"] = cert.c;
    out["R"] = cert.R;
    out["alpha"] = cert.alpha;
    out["gamma"] = cert.gamma;
    out["worst_residual"] = cert.worst_residual;
    out["ineq4_margin"] = cert.ineq4_margin;
    out["delta"] = cert.delta;
    out["epsilon"] = cert.epsilon;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "relativistic momentum-space diffusions: equilibria, simulation, "
              "spectral gaps and certified convergence rates";
    m.attr("__version__") = VERSION_INFO;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<CoefficientSet>(m, "Model")
        .def_readonly("name", &CoefficientSet::name)
        .def_readonly("builtin", &CoefficientSet::builtin)
        .def_readonly("d", &CoefficientSet::d)
        .def_readonly("beta", &CoefficientSet::beta)
        .def_readonly("epsilon", &CoefficientSet::epsilon)
        .def_readonly("epsilon_prime", &CoefficientSet::epsilon_prime)
        .def_readonly("tail_start", &CoefficientSet::tail_start)
        .def_readonly("eta_is_zero", &CoefficientSet::eta_is_zero)
        .def("f", [](const CoefficientSet& c, double r) { return c.f(r); }, py::arg("r"))
        .def("b", [](const CoefficientSet& c, double r) { return c.b(r); }, py::arg("r"))
        .def("sigma", [](const CoefficientSet& c, double r) { return c.sigma(r); },
             py::arg("r"))
        .def("eta", [](const CoefficientSet& c, double r) { return c.eta(r); },
             py::arg("r"))
        .def("g", &CoefficientSet::g, py::arg("r"),
             "effective friction 2 r b(r) / sigma(r)^2")
        .def("__repr__", [](const CoefficientSet& c) {
            return "<Model " + (c.name.empty() ? std::string("?") : c.name) +
                   " d=" + std::to_string(c.d) + " beta=" + std::to_string(c.beta) +
                   ">";
        });

    m.def("builtin_model", &builtin_model, py::arg("name"), py::arg("d") = 3,
          py::arg("beta") = 1.0, py::arg("ou_b") = 1.0,
          "one of 'classical_ou', 'roup', 'dunkel_hanggi'");
    m.def("load_model", &load_model, py::arg("path"));
    m.def("model_from_json", &load_model_json, py::arg("json_text"));

    m.def(
        "check_hypotheses",
        [](const CoefficientSet& c, std::size_t n_nodes, double r_max) {
            return report_dict(check_hypotheses(c, check_grid(c, n_nodes, r_max)));
        },
        py::arg("model"), py::arg("n_nodes") = 4096, py::arg("r_max") = 50.0,
        "admissibility report as a dict; 'passed' judges against the model's "
        "floor when it has one, else against the grid optimum epsilon_star");

    py::class_<EquilibriumMeasure>(m, "EquilibriumMeasure")
        .def_property_readonly(
            "nodes", [](const EquilibriumMeasure& em) { return em.grid.nodes; })
        .def_readonly("radial_pdf", &EquilibriumMeasure::radial_pdf)
        .def_readonly("radial_cdf", &EquilibriumMeasure::radial_cdf)
        .def_readonly("Z", &EquilibriumMeasure::Z)
        .def_readonly("Z_rad", &EquilibriumMeasure::Z_rad)
        .def_property_readonly(
            "r_max", [](const EquilibriumMeasure& em) { return em.r_max(); })
        .def_property_readonly(
            "d", [](const EquilibriumMeasure& em) { return em.coeffs.d; })
        .def_property_readonly(
            "beta", [](const EquilibriumMeasure& em) { return em.coeffs.beta; });

    m.def("build_measure", &build_measure, py::arg("model"),
          py::arg("n_nodes") = 4096, py::arg("r_max") = 50.0);

    m.def(
        "sample_equilibrium",
        [](const EquilibriumMeasure& em, std::size_t n, std::uint64_t seed) {
            return reshape(sample_equilibrium(em, n, seed), em.coeffs.d);
        },
        py::arg("measure"), py::arg("n"), py::arg("seed") = 0,
        "n independent momenta from the invariant law, as an n x d list");

    m.def(
        "simulate",
        [](const CoefficientSet& c, int n_paths, double dt, double t_end,
           std::uint64_t seed, const std::vector<double>& checkpoints,
           bool positions) {
            SimConfig cfg;
            cfg.dt = dt;
            cfg.t_end = t_end;
            cfg.seed = seed;
            cfg.n_paths = n_paths;
            cfg.checkpoint_times = checkpoints;
            cfg.record_positions = positions;
            cfg.validate();
            std::vector<PhasePoint> inits(static_cast<std::size_t>(n_paths),
                                          rest_state(c.d));
            auto res = simulate_ensemble(inits, c, cfg);
            py::dict out;
            py::list snaps;
            for (const auto& s : res.snapshots) snaps.append(snapshot_dict(s));
            out["snapshots"] = snaps;
            out["failed_paths"] = res.failed_paths;
            out["failure_diagnostics"] = res.failure_diagnostics;
            return out;
        },
        py::arg("model"), py::arg("n_paths") = 1, py::arg("dt") = 1e-3,
        py::arg("t_end") = 50.0, py::arg("seed") = 0,
        py::arg("checkpoints") = std::vector<double>{},
        py::arg("positions") = false,
        "evolve n_paths copies started at rest; returns per-checkpoint "
        "snapshots of momenta (and positions on request)");

    m.def(
        "spectral_gap",
        [](const CoefficientSet& c, const EquilibriumMeasure& em) {
            return gap_dict(spectral_gap(c, em));
        },
        py::arg("model"), py::arg("measure"));

    m.def(
        "lyapunov_certificate",
        [](const CoefficientSet& c) { return cert_dict(lyapunov_certificate(resolved(c))); },
        py::arg("model"),
        "drift certificate L W <= -alpha W + gamma 1_ball for "
        "W = exp(c sqrt(delta^2 + r^2))");

    m.def(
        "certify",
        [](const CoefficientSet& c0, std::size_t n_nodes, double r_max) {
            auto c = resolved(c0);
            auto em = build_measure(c, n_nodes, r_max);
            auto cert = lyapunov_certificate(c);
            auto gap = spectral_gap(c, em);
            auto bound = poincare_constant(cert, c, em, &gap);
            py::dict out;
            out["epsilon"] = c.epsilon;
            out["c"] = cert.c;
            out["R"] = cert.R;
            out["alpha"] = cert.alpha;
            out["gamma"] = cert.gamma;
            out["kappa_R"] = bound.kappa_R;
            out["c2"] = bound.c2;
            out["rate"] = 1.0 / bound.c2;
            out["lambda1"] = gap.lambda1;
            out["consistent"] = bound.consistent;
            return out;
        },
        py::arg("model"), py::arg("n_nodes") = 4096, py::arg("r_max") = 50.0,
        "full chain: measure, drift certificate, spectral gap, explicit "
        "spectral-gap lower bound 1/c2 with its consistency flag");

    m.def(
        "decay_study",
        [](const CoefficientSet& c0, std::size_t op_nodes, double t_end, double dt,
           double center, double width, bool certified, std::size_t measure_nodes,
           double r_max) {
            auto c = resolved(c0);
            auto em = build_measure(c, measure_nodes, r_max);
            auto op = discretize_generator(c, em, 0, op_nodes);
            auto h0 = gaussian_bump_density(op, center, width);
            auto flow = evolve_density(op, h0, t_end, dt);
            py::dict out;
            if (certified) {
                auto cert = lyapunov_certificate(c);
                auto gap = spectral_gap(c, em);
                auto bound = poincare_constant(cert, c, em, &gap);
                auto rep = decay_report(flow, &bound);
                out["c2"] = bound.c2;
                out["lambda1"] = gap.lambda1;
                out["bound_rate"] = rep.bound_rate;
                out["bound_checked"] = rep.bound_checked;
                out["times"] = rep.times;
                out["l2"] = rep.l2_distances;
                out["tv"] = rep.tv_distances;
                out["fitted_rate_l2"] = rep.fitted_rate_l2;
                out["fitted_rate_tv"] = rep.fitted_rate_tv;
                out["l2_window_found"] = rep.l2_window_found;
                out["tv_window_found"] = rep.tv_window_found;
            } else {
                auto rep = decay_report(flow);
                out["times"] = rep.times;
                out["l2"] = rep.l2_distances;
                out["tv"] = rep.tv_distances;
                out["fitted_rate_l2"] = rep.fitted_rate_l2;
                out["fitted_rate_tv"] = rep.fitted_rate_tv;
                out["l2_window_found"] = rep.l2_window_found;
                out["tv_window_found"] = rep.tv_window_found;
            }
            return out;
        },
        py::arg("model"), py::arg("op_nodes") = 2048, py::arg("t_end") = 80.0,
        py::arg("dt") = 5e-3, py::arg("center") = 3.0, py::arg("width") = 1.2,
        py::arg("certified") = true, py::arg("measure_nodes") = 4096,
        py::arg("r_max") = 50.0,
        "relax a radial bump under the density flow and fit its decay rate; "
        "with certified=True the fit is checked against the certificate floor");
}
