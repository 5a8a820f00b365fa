#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "reldiff/common.hpp"

namespace reldiff {

/// Radial grid on [0, r_max]. Nodes are strictly increasing, nodes[0] == 0.
struct RadialGrid {
    std::vector<double> nodes;
    std::string kind;  // "uniform" or "hybrid"

    std::size_t size() const { return nodes.size(); }
    double r_max() const { return nodes.back(); }
    double operator[](std::size_t i) const { return nodes[i]; }
};

/// Uniform grid with n+1 nodes, spacing r_max/n.
RadialGrid make_uniform_grid(std::size_t n, double r_max);

/// Geometric-then-uniform hybrid: roughly n/8 log-spaced nodes on
/// (0, r_switch] resolve the density near the origin, the rest are uniform on
/// [r_switch, r_max].  r_switch = min(1, r_max/10), so r = 1 is always a node
/// when r_max >= 10.  Total node count is n+1 including r = 0.
RadialGrid make_hybrid_grid(std::size_t n, double r_max);

/// Insert a value as an exact node (keeps ordering; no-op if already present
/// within 1e-14 relative).
void insert_node(RadialGrid& grid, double r);

}  // namespace reldiff
