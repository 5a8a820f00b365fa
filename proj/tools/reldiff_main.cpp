// Command-line driver: reproducible runs of the model checks, simulator,
// equilibrium construction, spectral analysis and certification, each writing
// its artifacts plus a run manifest into --out.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "reldiff/analysis.hpp"
#include "reldiff/common.hpp"
#include "reldiff/equilibrium.hpp"
#include "reldiff/model.hpp"
#include "reldiff/phase_space.hpp"
#include "reldiff/sde.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reldiff;

namespace {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ModelArgs {
    std::string builtin;
    std::string model_file;
    double beta = 1.0;
    int d = 3;
    double ou_b = 1.0;
    CLI::Option* beta_opt = nullptr;
    CLI::Option* d_opt = nullptr;
    CLI::Option* b_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--builtin", builtin,
                        "builtin model: classical_ou, roup, dunkel_hanggi");
        cmd->add_option("--model", model_file, "model description JSON file");
        beta_opt = cmd->add_option("--beta", beta, "inverse temperature")
                       ->capture_default_str();
        d_opt = cmd->add_option("--d", d, "momentum dimension")->capture_default_str();
        b_opt = cmd->add_option("--b", ou_b, "classical_ou friction coefficient")
                    ->capture_default_str();
    }

    CoefficientSet build() const {
        const bool have_builtin = !builtin.empty();
        const bool have_file = !model_file.empty();
        if (have_builtin == have_file)
            throw ValidationError("exactly one of --builtin or --model is required");
        if (have_file) {
            if (beta_opt->count() || d_opt->count() || b_opt->count())
                throw ValidationError(
                    "--beta/--d/--b are ignored with --model; set them in the file");
            return load_model(model_file);
        }
        return builtin_model(builtin, d, beta, ou_b);
    }

    std::string label() const { return model_file.empty() ? builtin : model_file; }
};

// Populate the ellipticity floor for models loaded without one; the builtins
// and explicit-epsilon files already carry it.
void ensure_epsilon(CoefficientSet& coeffs, std::size_t grid_n, double r_max) {
    if (coeffs.epsilon > 0.0) return;
    auto grid = make_hybrid_grid(grid_n, r_max);
    if (coeffs.tail_start > 0.0) insert_node(grid, coeffs.tail_start);
    const HypothesisReport rep = check_hypotheses(coeffs, grid);
    if (!rep.passed)
        throw ValidationError(std::string("model fails the admissibility check: ") +
                              to_string(rep.reason));
    coeffs.epsilon = rep.epsilon_star;
    coeffs.epsilon_prime = 0.499 * coeffs.beta * coeffs.epsilon;
}

json report_to_json(const HypothesisReport& rep) {
    return json{{"passed", rep.passed},
                {"reason", to_string(rep.reason)},
                {"sigma_min", rep.sigma_min},
                {"g_tail_min", rep.g_tail_min},
                {"tail_start", rep.tail_start_r0},
                {"tail_end", rep.tail_end},
                {"f_tail_ok", rep.f_tail_ok},
                {"f_tail_final", rep.f_tail_final},
                {"epsilon_star", rep.epsilon_star},
                {"epsilon_used", rep.epsilon_used},
                {"epsilon_prime_used", rep.epsilon_prime_used},
                {"grid",
                 {{"kind", rep.grid_used.kind},
                  {"nodes", rep.grid_used.nodes},
                  {"r_max", rep.grid_used.r_max}}}};
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file " + path.string());
    out << text;
    if (!out) throw ValidationError("failed writing " + path.string());
}

struct Manifest {
    std::string command;
    std::string model;
    json parameters = json::object();
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void write(const fs::path& out_dir) const {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                .count();
        json m{{"command", command},
               {"model", model},
               {"parameters", parameters},
               {"tool_version", kVersion},
               {"outputs", outputs},
               {"wall_time_seconds", wall}};
        write_file(out_dir / "run.json", m.dump(2) + "\n");
    }
};

// ---- subcommand argument bundles ----

struct CommonOut {
    std::string out_dir = ".";
    void attach(CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    }
    fs::path prepare() const {
        fs::path p(out_dir);
        fs::create_directories(p);
        return p;
    }
};

struct MeasureArgs {
    std::size_t grid = 4096;
    double rmax = 50.0;
    void attach(CLI::App* cmd, const char* grid_desc = "radial grid nodes") {
        cmd->add_option("--grid", grid, grid_desc)->capture_default_str();
        cmd->add_option("--rmax", rmax, "initial radial extent")->capture_default_str();
    }
};

int run_model_check(const ModelArgs& margs, const CommonOut& oargs,
                    const MeasureArgs& gargs, double tail_start) {
    Manifest man;
    man.command = "model-check";
    man.model = margs.label();
    const fs::path out = oargs.prepare();

    CoefficientSet coeffs = margs.build();
    auto grid = make_hybrid_grid(gargs.grid, gargs.rmax);
    const double tail_lo = tail_start > 0.0 ? tail_start : -1.0;
    if (coeffs.tail_start > 0.0) insert_node(grid, coeffs.tail_start);
    if (tail_lo > 0.0) insert_node(grid, tail_lo);
    const HypothesisReport rep = check_hypotheses(coeffs, grid, tail_lo);

    man.parameters = {{"beta", coeffs.beta},      {"d", coeffs.d},
                      {"grid", gargs.grid},       {"rmax", gargs.rmax},
                      {"tail_start", rep.tail_start_r0}};
    const json jrep = report_to_json(rep);
    write_file(out / "hypothesis.json", jrep.dump(2) + "\n");
    man.outputs = {"hypothesis.json"};
    man.write(out);

    std::cout << "hypothesis check for " << coeffs.name << ": "
              << (rep.passed ? "PASSED" : "FAILED") << "\n"
              << jrep.dump(2) << "\n";
    return rep.passed ? 0 : 1;
}

int run_simulate(const ModelArgs& margs, const CommonOut& oargs, const SimConfig& cfg_in,
                 double checkpoint_every) {
    Manifest man;
    man.command = "simulate";
    man.model = margs.label();
    const fs::path out = oargs.prepare();

    CoefficientSet coeffs = margs.build();
    SimConfig cfg = cfg_in;
    if (checkpoint_every > 0.0) {
        for (double t = 0.0; t < cfg.t_end - 1e-12; t += checkpoint_every)
            cfg.checkpoint_times.push_back(t);
        cfg.checkpoint_times.push_back(cfg.t_end);
    }
    cfg.validate();

    man.parameters = {{"beta", coeffs.beta},
                      {"d", coeffs.d},
                      {"seed", cfg.seed},
                      {"dt", cfg.dt},
                      {"t_end", cfg.t_end},
                      {"paths", cfg.n_paths},
                      {"checkpoint_every", checkpoint_every},
                      {"record_positions", cfg.record_positions}};

    const int d = coeffs.d;
    int exit_code = 0;
    if (cfg.n_paths == 1) {
        const Trajectory traj = simulate_trajectory(rest_state(d), coeffs, cfg);
        std::string csv = "t,s";
        for (int i = 1; i <= d; ++i) csv += ",x" + std::to_string(i);
        csv += ",p0";
        for (int i = 1; i <= d; ++i) csv += ",p" + std::to_string(i);
        csv += "\n";
        for (const auto& pt : traj.points) {
            csv += num17(pt.t) + "," + num17(pt.s);
            for (int i = 0; i < d; ++i) csv += "," + num17(pt.x[i]);
            csv += "," + num17(pt.p0);
            for (int i = 0; i < d; ++i) csv += "," + num17(pt.p[i]);
            csv += "\n";
        }
        write_file(out / "trajectory.csv", csv);
        man.outputs = {"trajectory.csv"};
        if (traj.truncated) {
            std::cerr << "warning: " << traj.diagnostic << "\n";
            man.parameters["truncated"] = true;
            exit_code = 2;
        }
        std::cout << "wrote " << traj.points.size() << " checkpoint(s) to "
                  << (out / "trajectory.csv").string() << "\n";
    } else {
        std::vector<PhasePoint> inits(static_cast<std::size_t>(cfg.n_paths),
                                      rest_state(d));
        const EnsembleResult res = simulate_ensemble(inits, coeffs, cfg);
        std::string csv = "time,path";
        for (int i = 1; i <= d; ++i) csv += ",p" + std::to_string(i);
        if (cfg.record_positions)
            for (int i = 1; i <= d; ++i) csv += ",x" + std::to_string(i);
        csv += "\n";
        for (const auto& snap : res.snapshots) {
            const std::string t = num17(snap.time);
            for (std::size_t pth = 0; pth < snap.n_paths; ++pth) {
                csv += t + "," + std::to_string(pth);
                for (int i = 0; i < d; ++i) csv += "," + num17(snap.p(pth, i));
                if (snap.has_positions)
                    for (int i = 0; i < d; ++i) csv += "," + num17(snap.x(pth, i));
                csv += "\n";
            }
        }
        write_file(out / "snapshots.csv", csv);
        man.outputs = {"snapshots.csv"};
        if (!res.failed_paths.empty()) {
            std::cerr << "warning: " << res.failed_paths.size()
                      << " path(s) blew up and were frozen at their last finite state\n";
            man.parameters["failed_paths"] = res.failed_paths.size();
            exit_code = 2;
        }
        std::cout << "wrote " << res.snapshots.size() << " snapshot time(s) for "
                  << cfg.n_paths << " paths to " << (out / "snapshots.csv").string()
                  << "\n";
    }
    man.write(out);
    return exit_code;
}

int run_equilibrium(const ModelArgs& margs, const CommonOut& oargs,
                    const MeasureArgs& gargs) {
    Manifest man;
    man.command = "equilibrium";
    man.model = margs.label();
    const fs::path out = oargs.prepare();

    CoefficientSet coeffs = margs.build();
    const EquilibriumMeasure measure = build_measure(coeffs, gargs.grid, gargs.rmax);
    man.parameters = {{"beta", coeffs.beta},
                      {"d", coeffs.d},
                      {"grid", gargs.grid},
                      {"rmax", gargs.rmax},
                      {"r_max_used", measure.r_max()},
                      {"Z", measure.Z}};

    std::string csv = "r,mu,G,V,pdf,cdf\n";
    for (std::size_t i = 0; i < measure.grid.nodes.size(); ++i) {
        csv += num17(measure.grid.nodes[i]) + "," + num17(measure.mu_vals[i]) + "," +
               num17(measure.G_vals[i]) + "," + num17(measure.V_vals[i]) + "," +
               num17(measure.radial_pdf[i]) + "," + num17(measure.radial_cdf[i]) + "\n";
    }
    write_file(out / "equilibrium.csv", csv);
    man.outputs = {"equilibrium.csv"};
    man.write(out);
    std::cout << "equilibrium measure on [0, " << measure.r_max() << "], Z = "
              << measure.Z << "\n";
    return 0;
}

int run_sample(const ModelArgs& margs, const CommonOut& oargs, const MeasureArgs& gargs,
               std::size_t n, std::uint64_t seed) {
    Manifest man;
    man.command = "sample";
    man.model = margs.label();
    const fs::path out = oargs.prepare();

    CoefficientSet coeffs = margs.build();
    const EquilibriumMeasure measure = build_measure(coeffs, gargs.grid, gargs.rmax);
    const std::vector<double> samples = sample_equilibrium(measure, n, seed);
    man.parameters = {{"beta", coeffs.beta}, {"d", coeffs.d},   {"grid", gargs.grid},
                      {"rmax", gargs.rmax},  {"n", n},           {"seed", seed}};

    const int d = coeffs.d;
    std::string csv;
    for (int i = 1; i <= d; ++i) csv += (i > 1 ? "," : "") + ("p" + std::to_string(i));
    csv += "\n";
    for (std::size_t k = 0; k < n; ++k) {
        for (int i = 0; i < d; ++i)
            csv += (i > 0 ? "," : "") +
                   num17(samples[k * static_cast<std::size_t>(d) +
                                 static_cast<std::size_t>(i)]);
        csv += "\n";
    }
    write_file(out / "samples.csv", csv);
    man.outputs = {"samples.csv"};
    man.write(out);
    std::cout << "wrote " << n << " equilibrium samples\n";
    return 0;
}

int run_gap(const ModelArgs& margs, const CommonOut& oargs, const MeasureArgs& gargs) {
    Manifest man;
    man.command = "gap";
    man.model = margs.label();
    const fs::path out = oargs.prepare();

    CoefficientSet coeffs = margs.build();
    const EquilibriumMeasure measure = build_measure(coeffs, gargs.grid, gargs.rmax);
    const GapResult gap = spectral_gap(coeffs, measure);
    man.parameters = {{"beta", coeffs.beta},
                      {"d", coeffs.d},
                      {"grid", gargs.grid},
                      {"rmax", gargs.rmax}};

    json j{{"lambda1", gap.lambda1},   {"sector", gap.sector},
           {"coarse", gap.coarse},     {"fine", gap.fine},
           {"converged", gap.converged}, {"lambda_l0", gap.lambda_l0},
           {"lambda_l1", gap.lambda_l1}};
    write_file(out / "gap.json", j.dump(2) + "\n");
    man.outputs = {"gap.json"};
    man.write(out);

    std::printf("spectral gap lambda1 = %.6g (sector l=%d, refinement %.3g -> %.3g)\n",
                gap.lambda1, gap.sector, gap.coarse, gap.fine);
    if (!gap.converged) {
        std::cerr << "warning: grid refinement 4096 -> 8192 moved the gap by more "
                     "than 0.5%; result is not converged\n";
        return 2;
    }
    return 0;
}

int run_lyapunov(const ModelArgs& margs, const CommonOut& oargs,
                 const MeasureArgs& gargs) {
    Manifest man;
    man.command = "lyapunov";
    man.model = margs.label();
    const fs::path out = oargs.prepare();

    CoefficientSet coeffs = margs.build();
    ensure_epsilon(coeffs, gargs.grid, gargs.rmax);
    const LyapunovCertificate cert = lyapunov_certificate(coeffs);
    man.parameters = {{"beta", coeffs.beta},
                      {"d", coeffs.d},
                      {"epsilon", coeffs.epsilon},
                      {"tail_start", coeffs.tail_start}};

    json j{{"c", cert.c},
           {"R", cert.R},
           {"alpha", cert.alpha},
           {"gamma", cert.gamma},
           {"worst_residual", cert.worst_residual},
           {"ineq4_margin", cert.ineq4_margin},
           {"delta", cert.delta},
           {"epsilon", cert.epsilon}};
    write_file(out / "lyapunov.json", j.dump(2) + "\n");
    man.outputs = {"lyapunov.json"};
    man.write(out);
    std::printf("drift certificate: c = %.6g, R = %.6g, alpha = %.6g, gamma = %.6g, "
                "worst residual = %.3g\n",
                cert.c, cert.R, cert.alpha, cert.gamma, cert.worst_residual);
    return 0;
}

int run_certify(const ModelArgs& margs, const CommonOut& oargs,
                const MeasureArgs& gargs) {
    Manifest man;
    man.command = "certify";
    man.model = margs.label();
    const fs::path out = oargs.prepare();

    CoefficientSet coeffs = margs.build();
    ensure_epsilon(coeffs, gargs.grid, gargs.rmax);
    const EquilibriumMeasure measure = build_measure(coeffs, gargs.grid, gargs.rmax);
    const LyapunovCertificate cert = lyapunov_certificate(coeffs);
    const GapResult gap = spectral_gap(coeffs, measure);
    const PoincareBound bound = poincare_constant(cert, coeffs, measure, &gap);
    man.parameters = {{"beta", coeffs.beta},
                      {"d", coeffs.d},
                      {"grid", gargs.grid},
                      {"rmax", gargs.rmax}};

    json j{{"model", coeffs.name},
           {"beta", coeffs.beta},
           {"d", coeffs.d},
           {"epsilon", coeffs.epsilon},
           {"c", cert.c},
           {"R", cert.R},
           {"alpha", cert.alpha},
           {"gamma", cert.gamma},
           {"kappa_R", bound.kappa_R},
           {"c2", bound.c2},
           {"lambda1", bound.lambda1},
           {"consistent", bound.consistent}};
    write_file(out / "certify.json", j.dump(2) + "\n");
    man.outputs = {"certify.json"};
    man.write(out);
    std::printf("certified: c2 = %.6g, 1/c2 = %.3g <= lambda1 = %.6g, consistent = %s\n",
                bound.c2, 1.0 / bound.c2, bound.lambda1,
                bound.consistent ? "true" : "false");
    return 0;
}

int run_decay(const ModelArgs& margs, const CommonOut& oargs, std::size_t op_grid,
              double dt, double t_end, double checkpoint_every, double bump_center,
              double bump_width) {
    Manifest man;
    man.command = "decay";
    man.model = margs.label();
    const fs::path out = oargs.prepare();

    CoefficientSet coeffs = margs.build();
    ensure_epsilon(coeffs, 4096, 50.0);
    const EquilibriumMeasure measure = build_measure(coeffs, 4096, 50.0);
    const LyapunovCertificate cert = lyapunov_certificate(coeffs);
    const GapResult gap = spectral_gap(coeffs, measure);
    const PoincareBound bound = poincare_constant(cert, coeffs, measure, &gap);

    const RadialOperator op0 = discretize_generator(coeffs, measure, 0, op_grid);
    const std::vector<double> h0 = gaussian_bump_density(op0, bump_center, bump_width);
    std::vector<double> checks;
    for (double t = 0.0; t < t_end - 1e-12; t += checkpoint_every) checks.push_back(t);
    checks.push_back(t_end);
    const DensityFlow flow = evolve_density(op0, h0, t_end, dt, checks);
    const DecayReport rep = decay_report(flow, &bound);

    man.parameters = {{"beta", coeffs.beta},
                      {"d", coeffs.d},
                      {"grid", op_grid},
                      {"dt", dt},
                      {"t_end", t_end},
                      {"checkpoint_every", checkpoint_every},
                      {"bump_center", bump_center},
                      {"bump_width", bump_width}};

    std::string csv = "t,l2,tv\n";
    for (std::size_t k = 0; k < rep.times.size(); ++k)
        csv += num17(rep.times[k]) + "," + num17(rep.l2_distances[k]) + "," +
               num17(rep.tv_distances[k]) + "\n";
    write_file(out / "decay.csv", csv);

    json j{{"fitted_rate_l2", rep.fitted_rate_l2},
           {"fitted_rate_tv", rep.fitted_rate_tv},
           {"l2_window_found", rep.l2_window_found},
           {"tv_window_found", rep.tv_window_found},
           {"bound_rate", rep.bound_rate},
           {"bound_checked", rep.bound_checked},
           {"c2", bound.c2},
           {"lambda1", bound.lambda1},
           {"gap_sector", gap.sector}};
    write_file(out / "decay.json", j.dump(2) + "\n");
    man.outputs = {"decay.csv", "decay.json"};
    man.write(out);

    std::printf("fitted decay rates: L2 = %.6g, TV = %.6g (certified floor %.3g, "
                "spectral gap %.6g)\n",
                rep.fitted_rate_l2, rep.fitted_rate_tv, rep.bound_rate, bound.lambda1);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relativistic diffusion toolkit: admissibility checks, SDE "
                 "simulation, equilibrium measures, spectral gaps and "
                 "convergence certificates"};
    app.require_subcommand(1);

    // model-check
    auto* cmd_check = app.add_subcommand("model-check", "verify the admissibility hypotheses");
    ModelArgs m_check;
    CommonOut o_check;
    MeasureArgs g_check;
    double tail_start = -1.0;
    m_check.attach(cmd_check);
    o_check.attach(cmd_check);
    g_check.attach(cmd_check, "check grid nodes");
    cmd_check->add_option("--tail-start", tail_start,
                          "override the tail window start radius");

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "integrate sample paths");
    ModelArgs m_sim;
    CommonOut o_sim;
    SimConfig sim_cfg;
    double checkpoint_every = 0.0;
    m_sim.attach(cmd_sim);
    o_sim.attach(cmd_sim);
    cmd_sim->add_option("--seed", sim_cfg.seed, "RNG seed")->capture_default_str();
    cmd_sim->add_option("--dt", sim_cfg.dt, "time step")->capture_default_str();
    cmd_sim->add_option("--t-end", sim_cfg.t_end, "final time")->capture_default_str();
    cmd_sim->add_option("--paths", sim_cfg.n_paths, "number of paths")
        ->capture_default_str();
    cmd_sim->add_option("--checkpoint-every", checkpoint_every,
                        "emit a checkpoint every this many time units (0 = final only)")
        ->capture_default_str();
    cmd_sim->add_flag("--positions", sim_cfg.record_positions,
                      "record positions in ensemble snapshots");

    // equilibrium
    auto* cmd_eq = app.add_subcommand("equilibrium", "tabulate the invariant measure");
    ModelArgs m_eq;
    CommonOut o_eq;
    MeasureArgs g_eq;
    m_eq.attach(cmd_eq);
    o_eq.attach(cmd_eq);
    g_eq.attach(cmd_eq);

    // sample
    auto* cmd_sample = app.add_subcommand("sample", "draw equilibrium momenta");
    ModelArgs m_sample;
    CommonOut o_sample;
    MeasureArgs g_sample;
    std::size_t n_samples = 10000;
    std::uint64_t sample_seed = 0;
    m_sample.attach(cmd_sample);
    o_sample.attach(cmd_sample);
    g_sample.attach(cmd_sample);
    cmd_sample->add_option("--n", n_samples, "sample count")->capture_default_str();
    cmd_sample->add_option("--seed", sample_seed, "RNG seed")->capture_default_str();

    // gap
    auto* cmd_gap = app.add_subcommand("gap", "numerical spectral gap");
    ModelArgs m_gap;
    CommonOut o_gap;
    MeasureArgs g_gap;
    m_gap.attach(cmd_gap);
    o_gap.attach(cmd_gap);
    g_gap.attach(cmd_gap, "measure grid nodes (the operator uses 4096 and 8192)");

    // lyapunov
    auto* cmd_lyap = app.add_subcommand("lyapunov", "drift-condition certificate");
    ModelArgs m_lyap;
    CommonOut o_lyap;
    MeasureArgs g_lyap;
    m_lyap.attach(cmd_lyap);
    o_lyap.attach(cmd_lyap);
    g_lyap.attach(cmd_lyap, "hypothesis-check grid nodes for custom models");

    // certify
    auto* cmd_cert = app.add_subcommand(
        "certify", "full convergence certificate (drift + local Poincare + gap)");
    ModelArgs m_cert;
    CommonOut o_cert;
    MeasureArgs g_cert;
    m_cert.attach(cmd_cert);
    o_cert.attach(cmd_cert);
    g_cert.attach(cmd_cert);

    // decay
    auto* cmd_decay =
        app.add_subcommand("decay", "measure the density-flow convergence rate");
    ModelArgs m_decay;
    CommonOut o_decay;
    std::size_t decay_grid = 2048;
    double decay_dt = 5e-3;
    double decay_t_end = 80.0;
    double decay_every = 0.25;
    double bump_center = 3.0;
    double bump_width = 1.2;
    m_decay.attach(cmd_decay);
    o_decay.attach(cmd_decay);
    cmd_decay->add_option("--grid", decay_grid, "radial operator nodes")
        ->capture_default_str();
    cmd_decay->add_option("--dt", decay_dt, "implicit-trapezoid step")
        ->capture_default_str();
    cmd_decay->add_option("--t-end", decay_t_end, "final time")->capture_default_str();
    cmd_decay->add_option("--checkpoint-every", decay_every, "checkpoint spacing")
        ->capture_default_str();
    cmd_decay->add_option("--bump-center", bump_center, "initial bump center radius")
        ->capture_default_str();
    cmd_decay->add_option("--bump-width", bump_width, "initial bump width")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (app.got_subcommand(cmd_check))
            return run_model_check(m_check, o_check, g_check, tail_start);
        if (app.got_subcommand(cmd_sim))
            return run_simulate(m_sim, o_sim, sim_cfg, checkpoint_every);
        if (app.got_subcommand(cmd_eq)) return run_equilibrium(m_eq, o_eq, g_eq);
        if (app.got_subcommand(cmd_sample))
            return run_sample(m_sample, o_sample, g_sample, n_samples, sample_seed);
        if (app.got_subcommand(cmd_gap)) return run_gap(m_gap, o_gap, g_gap);
        if (app.got_subcommand(cmd_lyap)) return run_lyapunov(m_lyap, o_lyap, g_lyap);
        if (app.got_subcommand(cmd_cert)) return run_certify(m_cert, o_cert, g_cert);
        if (app.got_subcommand(cmd_decay))
            return run_decay(m_decay, o_decay, decay_grid, decay_dt, decay_t_end,
                             decay_every, bump_center, bump_width);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
