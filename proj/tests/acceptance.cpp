// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// criteria hold. Each criterion re-derives its expected values independently
// of the library path under test wherever possible.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "reldiff/analysis.hpp"
#include "reldiff/equilibrium.hpp"
#include "reldiff/grid.hpp"
#include "reldiff/model.hpp"
#include "reldiff/phase_space.hpp"
#include "reldiff/quadrature.hpp"
#include "reldiff/sde.hpp"
#include "reldiff/tridiag.hpp"

namespace fs = std::filesystem;
using namespace reldiff;

namespace {

int g_fail_count = 0;

#define ACHECK(cond, msg)                                                        \
    do {                                                                         \
        if (!(cond)) {                                                           \
            std::ostringstream oss_;                                             \
            oss_ << msg;                                                         \
            std::printf("[FAIL] %s:%d  %s  (%s)\n", __FILE__, __LINE__,          \
                        oss_.str().c_str(), #cond);                              \
            ++g_fail_count;                                                      \
        }                                                                        \
    } while (0)

void run_criterion(int n, const char* label, const std::function<void()>& body) {
    const int before = g_fail_count;
    try {
        body();
    } catch (const std::exception& e) {
        std::printf("[FAIL] criterion %d raised: %s\n", n, e.what());
        ++g_fail_count;
    }
    if (g_fail_count == before)
        std::printf("[PASS] criterion %d: %s\n", n, label);
    else
        std::printf("[FAIL] criterion %d: %s\n", n, label);
    std::fflush(stdout);
}

// ---- shared helpers ----

std::vector<double> juttner_on_grid(const std::vector<double>& nodes, int d,
                                    double beta) {
    std::vector<double> v(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double r = nodes[i];
        v[i] = std::pow(r, d - 1) * std::exp(-beta * std::sqrt(1.0 + r * r));
    }
    double z = trapezoid(nodes, v);
    for (double& x : v) x /= z;
    return v;
}

double sup_rel_error(const std::vector<double>& expect,
                     const std::vector<double>& got) {
    double m = 0.0, err = 0.0;
    for (double x : expect) m = std::max(m, std::abs(x));
    for (std::size_t i = 0; i < expect.size(); ++i)
        if (std::abs(expect[i]) > 1e-12 * m)
            err = std::max(err, std::abs(expect[i] - got[i]) / std::abs(expect[i]));
    return err;
}

double interp_cdf(const EquilibriumMeasure& em, double r) {
    const auto& xs = em.grid.nodes;
    auto it = std::upper_bound(xs.begin(), xs.end(), r);
    if (it == xs.begin()) return 0.0;
    if (it == xs.end()) return 1.0;
    std::size_t j = static_cast<std::size_t>(it - xs.begin());
    double t = (r - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return em.radial_cdf[j - 1] + t * (em.radial_cdf[j] - em.radial_cdf[j - 1]);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
    const char* exe = std::getenv("RELDIFF_CLI");
    if (!exe) throw std::runtime_error("RELDIFF_CLI is not set");
    std::string cmd = std::string("\"") + exe + "\" " + args + " > \"" +
                      log.string() + "\" 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

// ---- criteria ----

void criterion_1() {
    for (const char* name : {"roup", "dunkel_hanggi"}) {
        auto c = builtin_model(name, 3, 1.0);
        auto grid = make_hybrid_grid(4096, 50.0);
        insert_node(grid, c.tail_start);
        auto rep = check_hypotheses(c, grid);
        ACHECK(rep.passed, name << " should satisfy the hypotheses");
        ACHECK(rep.reason == HypothesisReason::ok, name << " reason code");
    }
    auto bad_sigma = load_model_json(R"json({
        "name": "bad_sigma", "d": 3, "beta": 1.0, "epsilon": 0.5,
        "f": "1", "b": "1", "sigma": "r", "eta": "0"
    })json");
    auto rep1 = check_hypotheses(bad_sigma, make_hybrid_grid(4096, 50.0));
    ACHECK(!rep1.passed, "vanishing sigma must fail");
    ACHECK(rep1.reason == HypothesisReason::sigma_below_floor,
           "expected sigma_below_floor, got " << to_string(rep1.reason));

    auto bad_g = load_model_json(R"json({
        "name": "bad_g", "d": 3, "beta": 1.0, "epsilon": 0.25,
        "f": "exp(-r)", "b": "exp(-r)", "sigma": "1", "eta": "0"
    })json");
    auto rep2 = check_hypotheses(bad_g, make_hybrid_grid(4096, 50.0));
    ACHECK(!rep2.passed, "decaying friction must fail");
    ACHECK(rep2.reason == HypothesisReason::g_tail_below_floor,
           "expected g_tail_below_floor, got " << to_string(rep2.reason));
}

void criterion_2() {
    const std::pair<int, double> combos[] = {{1, 1.0}, {3, 1.0}, {3, 2.0}};
    for (const char* name : {"roup", "dunkel_hanggi"}) {
        for (auto [d, beta] : combos) {
            auto c = builtin_model(name, d, beta);
            auto em = build_measure(c, 4096, 50.0);
            auto expect = juttner_on_grid(em.grid.nodes, d, beta);
            double err = sup_rel_error(expect, em.radial_pdf);
            ACHECK(err < 1e-8, name << " d=" << d << " beta=" << beta
                                    << " sup rel err " << err);
        }
    }
}

void criterion_3() {
    for (const char* name : {"roup", "dunkel_hanggi"}) {
        for (std::size_t n : {2048u, 4096u}) {
            auto c = builtin_model(name, 3, 1.0);
            auto em = build_measure(c, n, 50.0);
            auto r1 = stationarity_residual(
                em, [](const std::vector<double>& p) { return p[0]; });
            ACHECK(std::abs(r1.value) + r1.error_estimate < 1e-6,
                   name << " n=" << n << " residual(p1) = " << r1.value);
            auto r2 = stationarity_residual_radial(
                em, [](double r) { return r * r; },
                [](double r) { return 2.0 * r; }, [](double) { return 2.0; });
            ACHECK(std::abs(r2.value) + r2.error_estimate < 1e-6,
                   name << " n=" << n << " residual(|p|^2) = " << r2.value);
            auto r3 = stationarity_residual_radial(
                em, [](double r) { return std::exp(-r * r); },
                [](double r) { return -2.0 * r * std::exp(-r * r); },
                [](double r) { return (4.0 * r * r - 2.0) * std::exp(-r * r); });
            ACHECK(std::abs(r3.value) + r3.error_estimate < 1e-6,
                   name << " n=" << n << " residual(exp(-|p|^2)) = " << r3.value);
        }
    }
}

void criterion_4() {
    auto ou = builtin_model("classical_ou", 3, 1.0, 1.0);
    auto em = build_measure(ou, 4096, 50.0);
    auto gap = spectral_gap(ou, em);
    ACHECK(std::abs(gap.lambda1 - 1.0) <= 0.01,
           "spectral gap " << gap.lambda1 << " should be 1 within 1%");
    ACHECK(gap.sector == 1, "gap should come from the first angular sector");
    ACHECK(std::abs(gap.lambda_l0 - 2.0) <= 0.02,
           "radial eigenvalue " << gap.lambda_l0 << " should be 2 within 1%");

    auto op = discretize_generator(ou, em, 0, 2048);
    auto h0 = gaussian_bump_density(op, 3.0, 1.2);
    auto flow = evolve_density(op, h0, 80.0, 5e-3);
    auto rep = decay_report(flow);
    ACHECK(rep.l2_window_found, "no fit window found");
    ACHECK(std::abs(rep.fitted_rate_l2 - 2.0) <= 0.04,
           "fitted radial rate " << rep.fitted_rate_l2 << " should be 2 within 2%");
}

void criterion_5() {
    for (const char* name : {"roup", "dunkel_hanggi"}) {
        auto c = builtin_model(name, 3, 1.0);
        auto cert = lyapunov_certificate(c);
        const double eps = cert.epsilon;
        ACHECK(cert.alpha == cert.c * eps * eps * eps / 4.0,
               name << " alpha must equal c eps^3 / 4 exactly");
        ACHECK((c.d - 1) / cert.R + cert.c <= c.beta * eps / 2.0 + 1e-12,
               name << " exponent constraint violated");
        ACHECK(cert.worst_residual <= 0.0, name << " certified residual positive");
        ACHECK(cert.ineq4_margin >= 0.0, name << " rearranged-form margin negative");

        // independent verification: finite-difference generator action on the
        // candidate function at every node of a uniform 4096-point grid
        auto grid = make_uniform_grid(4095, 50.0);
        const double delta = cert.delta, cc = cert.c;
        auto W = [&](double r) { return std::exp(cc * std::sqrt(delta * delta + r * r)); };
        const double h = 1e-4;
        for (double r : grid.nodes) {
            if (r < h) continue;  // degenerate stencil; covered by the ball term
            double sv = c.sigma(r);
            double a = sv * sv / (2.0 * c.beta);
            double ev = c.eta(r);
            double drift = (c.d - 1) / (r * (1.0 + ev * ev)) - c.beta * c.g(r);
            double w0 = W(r), wp = W(r + h), wm = W(r - h);
            double lw = a * ((wp - 2.0 * w0 + wm) / (h * h) +
                             drift * (wp - wm) / (2.0 * h));
            double ball = r <= cert.R ? cert.gamma : 0.0;
            double resid = lw + cert.alpha * w0 - ball;
            ACHECK(resid <= 1e-4 * w0,
                   name << " drift residual " << resid << " at r = " << r);
            // rearranged pointwise inequality -LW + gamma 1_B >= alpha W
            ACHECK((-lw + ball) / (cert.alpha * w0) >= 1.0 - 1e-4,
                   name << " pointwise inequality fails at r = " << r);
        }
    }
}

void criterion_6() {
    for (const char* name : {"roup", "dunkel_hanggi"}) {
        for (double beta : {1.0, 2.0}) {
            for (int d : {1, 3}) {
                auto c = builtin_model(name, d, beta);
                auto em = build_measure(c, 4096, 50.0);
                auto cert = lyapunov_certificate(c);
                auto gap = spectral_gap(c, em);
                auto bound = poincare_constant(cert, c, em, &gap);
                ACHECK(bound.consistent,
                       name << " beta=" << beta << " d=" << d
                            << ": 1/c2 = " << 1.0 / bound.c2
                            << " exceeds lambda1 = " << gap.lambda1);
                ACHECK(1.0 / bound.c2 <= gap.lambda1 * (1.0 + 1e-9),
                       name << " beta=" << beta << " d=" << d
                            << " consistency margin");
            }
        }
    }
}

void criterion_7() {
    auto c = builtin_model("roup", 3, 1.0);
    auto em = build_measure(c, 4096, 50.0);
    auto cert = lyapunov_certificate(c);
    auto gap = spectral_gap(c, em);
    auto bound = poincare_constant(cert, c, em, &gap);

    auto op = discretize_generator(c, em, 0, 2048);
    auto h0 = gaussian_bump_density(op, 3.0, 1.2);
    auto flow = evolve_density(op, h0, 80.0, 5e-3);
    auto rep = decay_report(flow, &bound);
    ACHECK(rep.bound_checked, "certified floor was not asserted");

    const double rate_floor = 1.0 / (2.0 * bound.c2);
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        double t = rep.times[k];
        double envelope = std::exp(-rate_floor * t) * rep.l2_distances[0];
        ACHECK(rep.l2_distances[k] <= envelope * (1.0 + 1e-9),
               "L2 distance exceeds the certified envelope at t = " << t);
        ACHECK(rep.tv_distances[k] <= rep.l2_distances[k] + 1e-12,
               "TV exceeds L2 at t = " << t);
    }
    ACHECK(rep.fitted_rate_l2 >= rate_floor * (1.0 - 1e-9),
           "fitted rate " << rep.fitted_rate_l2 << " below certified floor "
                          << rate_floor);
    ACHECK(std::abs(rep.fitted_rate_l2 - gap.lambda1) <= 0.05 * gap.lambda1,
           "fitted rate " << rep.fitted_rate_l2 << " not within 5% of lambda1 = "
                          << gap.lambda1);
}

void criterion_8() {
    auto c = builtin_model("roup", 3, 1.0);
    auto em = build_measure(c, 4096, 50.0);

    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 50.0;
    cfg.seed = 12345;
    cfg.n_paths = 100000;
    cfg.checkpoint_times = {12.5, 25.0, 37.5, 50.0};
    std::vector<PhasePoint> inits(100000, rest_state(3));
    auto res = simulate_ensemble(inits, c, cfg);
    ACHECK(res.failed_paths.empty(),
           res.failed_paths.size() << " paths failed unexpectedly");

    // energies recomputed from the momenta satisfy the pseudo-norm relation
    for (const auto& snap : res.snapshots) {
        double worst = 0.0;
        for (std::size_t pth = 0; pth < snap.n_paths; ++pth) {
            double rr = 0.0;
            for (int i = 0; i < 3; ++i) rr += snap.p(pth, i) * snap.p(pth, i);
            double p0 = std::sqrt(1.0 + rr);
            worst = std::max(worst, std::abs(p0 * p0 - rr - 1.0));
        }
        ACHECK(worst <= 1e-10,
               "pseudo-norm defect " << worst << " at t = " << snap.time);
    }

    // the terminal radial law matches the equilibrium within the 1% KS band
    const auto& last = res.snapshots.back();
    std::vector<double> radii(last.n_paths);
    for (std::size_t pth = 0; pth < last.n_paths; ++pth) {
        double rr = 0.0;
        for (int i = 0; i < 3; ++i) rr += last.p(pth, i) * last.p(pth, i);
        radii[pth] = std::sqrt(rr);
    }
    std::sort(radii.begin(), radii.end());
    const double n = static_cast<double>(radii.size());
    double dks = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        double f = interp_cdf(em, radii[i]);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        dks = std::max(dks, std::max(f - lo, hi - f));
    }
    ACHECK(dks * std::sqrt(n) < 1.6276,
           "KS statistic " << dks * std::sqrt(n) << " outside the 1% band");
}

void criterion_9() {
    const fs::path base = "acc_tmp";
    fs::remove_all(base);
    const std::vector<std::string> seeded = {
        "simulate --builtin roup --beta 1 --d 3 --seed 5 --dt 1e-2 --t-end 1 "
        "--checkpoint-every 0.25",
        "simulate --builtin dunkel_hanggi --beta 1 --d 3 --paths 4 --seed 11 "
        "--dt 1e-2 --t-end 0.5 --checkpoint-every 0.25 --positions",
        "sample --builtin roup --beta 1 --d 3 --grid 512 --n 200 --seed 9",
    };
    for (std::size_t k = 0; k < seeded.size(); ++k) {
        fs::path da = base / ("a" + std::to_string(k));
        fs::path db = base / ("b" + std::to_string(k));
        fs::create_directories(da);
        fs::create_directories(db);
        int ra = run_cli(seeded[k] + " --out " + da.string(), da / "log.txt");
        int rb = run_cli(seeded[k] + " --out " + db.string(), db / "log.txt");
        ACHECK(ra == 0, "command " << k << " first run exit " << ra);
        ACHECK(rb == 0, "command " << k << " second run exit " << rb);
        for (const auto& entry : fs::directory_iterator(da)) {
            const std::string fname = entry.path().filename().string();
            if (fname == "run.json" || fname == "log.txt") continue;
            ACHECK(fs::exists(db / fname), fname << " missing from second run");
            ACHECK(slurp(entry.path()) == slurp(db / fname),
                   fname << " differs between identical runs of command " << k);
        }
    }
}

}  // namespace

int main() {
    run_criterion(1, "hypothesis check accepts the builtins and rejects the counterexamples",
                  criterion_1);
    run_criterion(2, "equilibrium radial densities match the relativistic Maxwell law",
                  criterion_2);
    run_criterion(3, "generator test functions integrate to zero against the equilibrium",
                  criterion_3);
    run_criterion(4, "classical model: gap 1, radial eigenvalue 2, fitted rate 2",
                  criterion_4);
    run_criterion(5, "drift certificates verify pointwise on the evaluation grid",
                  criterion_5);
    run_criterion(6, "certified rates stay below the spectral gap on all eight chains",
                  criterion_6);
    run_criterion(7, "density flow obeys the certified envelope and tracks the gap",
                  criterion_7);
    run_criterion(8, "long ensemble equilibrates onto the invariant radial law",
                  criterion_8);
    run_criterion(9, "seeded commands reproduce byte-identical outputs",
                  criterion_9);

    if (g_fail_count == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance check(s) failed\n", g_fail_count);
    return 1;
}
