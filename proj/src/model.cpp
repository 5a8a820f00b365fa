#include "reldiff/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "reldiff/expression.hpp"

namespace reldiff {

namespace {

void check_finite(const char* which, double value, double r) {
    if (!std::isfinite(value)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "coefficient %s(r) non-finite at r = %.17g", which, r);
        throw ValidationError(buf);
    }
}

CoefficientSet make_builtin(const std::string& name, int d, double beta, double ou_b) {
    if (d < 1) throw ValidationError("builtin_model: d must be >= 1");
    if (!(beta > 0)) throw ValidationError("builtin_model: beta must be > 0");
    CoefficientSet c;
    c.d = d;
    c.beta = beta;
    c.name = name;
    c.builtin = name;
    if (name == "classical_ou") {
        if (!(ou_b > 0)) throw ValidationError("classical_ou: friction b must be > 0");
        c.f = [](double) { return 1.0; };
        c.b = [ou_b](double) { return ou_b; };
        c.sigma = [](double) { return std::sqrt(2.0); };
        c.eta = [](double) { return 0.0; };
        c.eta_is_zero = true;
        c.ou_b = ou_b;
        c.tail_start = 1.0;
    } else if (name == "roup") {
        c.f = [](double r) { return 1.0 / std::sqrt(1.0 + r * r); };
        c.b = [](double r) { return 1.0 / std::sqrt(1.0 + r * r); };
        c.sigma = [](double) { return std::sqrt(2.0); };
        c.eta = [](double) { return 0.0; };
        c.eta_is_zero = true;
        c.tail_start = 1.0;
    } else if (name == "dunkel_hanggi") {
        double ratio = static_cast<double>(d) / beta;
        c.f = [](double r) { return 1.0 / std::sqrt(1.0 + r * r); };
        c.b = [ratio](double r) { return 1.0 - ratio / std::sqrt(1.0 + r * r); };
        c.sigma = [](double r) { return std::sqrt(2.0 * std::sqrt(1.0 + r * r)); };
        c.eta = [](double r) { return r; };
        c.eta_is_zero = false;
        // friction is negative near the origin when d > beta; the admissible
        // tail begins past the sign change at r = sqrt((d/beta)^2 - 1)
        c.tail_start = 5.0;
    } else {
        throw ValidationError("unknown builtin model '" + name +
                              "' (valid: classical_ou, roup, dunkel_hanggi)");
    }
    return c;
}

}  // namespace

const char* to_string(HypothesisReason r) {
    switch (r) {
        case HypothesisReason::ok: return "ok";
        case HypothesisReason::sigma_below_floor: return "sigma_below_floor";
        case HypothesisReason::g_tail_below_floor: return "g_tail_below_floor";
        case HypothesisReason::f_tail_not_vanishing: return "f_tail_not_vanishing";
    }
    return "?";
}

HypothesisReport check_hypotheses(const CoefficientSet& coeffs, const RadialGrid& grid,
                                  double tail_lo, double tail_hi, double f_tail_tol) {
    const double r_max = grid.r_max();
    if (tail_lo <= 0.0)
        tail_lo = coeffs.tail_start > 0.0 ? coeffs.tail_start : r_max / 10.0;
    if (tail_hi <= 0.0) tail_hi = r_max;
    if (!(tail_lo < tail_hi))
        throw ValidationError("check_hypotheses: tail window is empty");
    if (r_max < 10.0 * tail_lo - 1e-9)
        throw ValidationError("check_hypotheses: grid r_max must be at least 10x the tail start");

    HypothesisReport rep;
    rep.tail_start_r0 = tail_lo;
    rep.tail_end = tail_hi;
    rep.grid_used = {grid.kind, grid.size(), r_max};

    // evaluation points: all grid nodes, with the window endpoints inserted
    std::vector<double> pts = grid.nodes;
    pts.push_back(tail_lo);
    pts.push_back(tail_hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    double sigma_min = std::numeric_limits<double>::infinity();
    double g_tail_min = std::numeric_limits<double>::infinity();
    for (double r : pts) {
        double sv = coeffs.sigma(r);
        check_finite("sigma", sv, r);
        check_finite("b", coeffs.b(r), r);
        check_finite("f", coeffs.f(r), r);
        check_finite("eta", coeffs.eta(r), r);
        sigma_min = std::min(sigma_min, sv);
        if (r >= tail_lo - 1e-15 && r <= tail_hi + 1e-15) {
            double gv = coeffs.g(r);
            check_finite("g", gv, r);
            g_tail_min = std::min(g_tail_min, gv);
        }
    }
    rep.sigma_min = sigma_min;
    rep.g_tail_min = g_tail_min;
    rep.epsilon_star = std::max(0.0, std::min(sigma_min, g_tail_min));

    const double eps = coeffs.epsilon > 0.0 ? coeffs.epsilon : rep.epsilon_star;
    rep.epsilon_used = eps;
    double eps_prime = coeffs.epsilon_prime > 0.0 ? coeffs.epsilon_prime
                                                  : 0.499 * coeffs.beta * eps;
    rep.epsilon_prime_used = eps_prime;
    if (eps > 0.0 && !(eps_prime < coeffs.beta * eps / 2.0)) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "epsilon_prime = %.6g violates epsilon_prime < beta*epsilon/2 = %.6g",
                      eps_prime, coeffs.beta * eps / 2.0);
        throw ValidationError(buf);
    }

    // f tail: exp(-eps' r) f(r) monotonically nonincreasing on the window and
    // below tolerance at the far end (finite-grid surrogate for the limit)
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    double last = 0.0;
    for (double r : pts) {
        if (r < tail_lo - 1e-15 || r > tail_hi + 1e-15) continue;
        double v = std::exp(-eps_prime * r) * coeffs.f(r);
        if (v > prev * (1.0 + 1e-12) + 1e-300) monotone = false;
        prev = v;
        last = v;
    }
    rep.f_tail_final = last;
    rep.f_tail_ok = monotone && last < f_tail_tol;

    const double slack = 1e-15;
    bool sigma_ok = sigma_min >= eps - slack && eps > 0.0;
    bool g_ok = g_tail_min >= eps - slack && eps > 0.0;
    rep.passed = sigma_ok && g_ok && rep.f_tail_ok;
    if (!sigma_ok)
        rep.reason = HypothesisReason::sigma_below_floor;
    else if (!g_ok)
        rep.reason = HypothesisReason::g_tail_below_floor;
    else if (!rep.f_tail_ok)
        rep.reason = HypothesisReason::f_tail_not_vanishing;
    else
        rep.reason = HypothesisReason::ok;
    return rep;
}

CoefficientSet builtin_model(const std::string& name, int d, double beta, double ou_b) {
    CoefficientSet c = make_builtin(name, d, beta, ou_b);
    RadialGrid grid = make_hybrid_grid(4096, 50.0);
    insert_node(grid, c.tail_start);
    HypothesisReport rep = check_hypotheses(c, grid);
    c.epsilon = rep.epsilon_star;
    c.epsilon_prime = 0.499 * beta * c.epsilon;
    return c;
}

namespace {

CoefficientSet from_json(const nlohmann::json& j) {
    if (j.contains("builtin")) {
        std::string name = j.at("builtin").get<std::string>();
        int d = j.value("d", 3);
        double beta = j.value("beta", 1.0);
        double ou_b = j.value("b", 1.0);
        CoefficientSet c = builtin_model(name, d, beta, ou_b);
        if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
        if (j.contains("epsilon_prime")) c.epsilon_prime = j.at("epsilon_prime").get<double>();
        if (j.contains("tail_start")) c.tail_start = j.at("tail_start").get<double>();
        if (j.contains("name")) c.name = j.at("name").get<std::string>();
        return c;
    }
    for (const char* key : {"f", "b", "sigma", "eta", "d", "beta"})
        if (!j.contains(key))
            throw ValidationError(std::string("model file: missing key '") + key + "'");
    CoefficientSet c;
    c.d = j.at("d").get<int>();
    c.beta = j.at("beta").get<double>();
    if (c.d < 1) throw ValidationError("model file: d must be >= 1");
    if (!(c.beta > 0)) throw ValidationError("model file: beta must be > 0");
    auto compile = [&](const char* key) -> ScalarFn {
        std::string text = j.at(key).get<std::string>();
        Expression ex = Expression::parse(text);
        return [ex](double r) { return ex(r); };
    };
    c.f = compile("f");
    c.b = compile("b");
    c.sigma = compile("sigma");
    auto eta_text = j.at("eta").get<std::string>();
    c.eta = compile("eta");
    {
        // trim to detect the literal constant zero (enables skipping the
        // radial noise channel draw; '0*r' and friends do not qualify)
        std::string t;
        for (char ch : eta_text)
            if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
        c.eta_is_zero = (t == "0" || t == "0.0");
    }
    c.epsilon = j.value("epsilon", 0.0);
    c.epsilon_prime = j.value("epsilon_prime", 0.0);
    c.tail_start = j.value("tail_start", 0.0);
    c.name = j.value("name", std::string("custom"));
    return c;
}

}  // namespace

CoefficientSet load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_model_json(ss.str());
}

CoefficientSet load_model_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("model file: invalid JSON: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model file: ") + e.what());
    }
}

}  // namespace reldiff
