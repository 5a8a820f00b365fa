#include "reldiff/grid.hpp"

#include <algorithm>
#include <cmath>

namespace reldiff {

RadialGrid make_uniform_grid(std::size_t n, double r_max) {
    if (n < 2 || !(r_max > 0))
        throw ValidationError("make_uniform_grid: need n >= 2 and r_max > 0");
    RadialGrid g;
    g.kind = "uniform";
    g.nodes.resize(n + 1);
    const double h = r_max / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) g.nodes[i] = static_cast<double>(i) * h;
    g.nodes.back() = r_max;
    return g;
}

RadialGrid make_hybrid_grid(std::size_t n, double r_max) {
    if (n < 16 || !(r_max > 0))
        throw ValidationError("make_hybrid_grid: need n >= 16 and r_max > 0");
    RadialGrid g;
    g.kind = "hybrid";
    const double r_switch = std::min(1.0, r_max / 10.0);
    const std::size_t n_geo = n / 8;           // nodes on (0, r_switch]
    const std::size_t n_uni = n - n_geo;       // intervals on [r_switch, r_max]
    g.nodes.reserve(n + 1);
    g.nodes.push_back(0.0);
    // log-spaced from r_switch*1e-4 up to r_switch inclusive
    const double lo = std::log(r_switch * 1e-4), hi = std::log(r_switch);
    for (std::size_t j = 0; j < n_geo; ++j) {
        double t = static_cast<double>(j) / static_cast<double>(n_geo - 1);
        g.nodes.push_back(std::exp(lo + t * (hi - lo)));
    }
    g.nodes.back() = r_switch;
    const double h = (r_max - r_switch) / static_cast<double>(n_uni);
    for (std::size_t i = 1; i <= n_uni; ++i)
        g.nodes.push_back(r_switch + static_cast<double>(i) * h);
    g.nodes.back() = r_max;
    return g;
}

void insert_node(RadialGrid& grid, double r) {
    auto it = std::lower_bound(grid.nodes.begin(), grid.nodes.end(), r);
    if (it != grid.nodes.end() && std::abs(*it - r) <= 1e-14 * std::max(1.0, r)) return;
    if (it != grid.nodes.begin() && std::abs(*(it - 1) - r) <= 1e-14 * std::max(1.0, r)) return;
    grid.nodes.insert(it, r);
}

}  // namespace reldiff
