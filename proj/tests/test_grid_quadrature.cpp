#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "reldiff/common.hpp"
#include "reldiff/grid.hpp"
#include "reldiff/quadrature.hpp"

using namespace reldiff;

TEST_CASE("uniform grid layout") {
    auto g = make_uniform_grid(100, 50.0);
    REQUIRE(g.nodes.size() == 101);
    CHECK(g.kind == "uniform");
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 50.0);
    for (std::size_t i = 1; i < g.nodes.size(); ++i)
        CHECK(g.nodes[i] - g.nodes[i - 1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(make_uniform_grid(1, 50.0), ValidationError);
    CHECK_THROWS_AS(make_uniform_grid(100, -1.0), ValidationError);
}

TEST_CASE("hybrid grid layout") {
    auto g = make_hybrid_grid(4096, 50.0);
    REQUIRE(g.nodes.size() == 4097);
    CHECK(g.kind == "hybrid");
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 50.0);
    CHECK(std::is_sorted(g.nodes.begin(), g.nodes.end()));
    for (std::size_t i = 1; i < g.nodes.size(); ++i)
        CHECK(g.nodes[i] > g.nodes[i - 1]);
    // r = 1 is the switch point, so it is a node exactly
    CHECK(std::binary_search(g.nodes.begin(), g.nodes.end(), 1.0));
    // geometric section resolves small radii far better than 50/4096
    auto second = g.nodes[1];
    CHECK(second < 1e-3);
}

TEST_CASE("insert_node keeps order and avoids duplicates") {
    auto g = make_uniform_grid(10, 1.0);
    const auto n0 = g.nodes.size();
    insert_node(g, 0.5);  // already a node
    CHECK(g.nodes.size() == n0);
    insert_node(g, 0.55);
    CHECK(g.nodes.size() == n0 + 1);
    CHECK(std::is_sorted(g.nodes.begin(), g.nodes.end()));
    insert_node(g, 0.55);
    CHECK(g.nodes.size() == n0 + 1);
}

TEST_CASE("adaptive integration hits analytic values") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) ==
          doctest::Approx(2.0).epsilon(1e-11));
    CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
          doctest::Approx(std::numbers::e - 1.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return 4.0 / (1.0 + x * x); }, 0.0, 1.0) ==
          doctest::Approx(std::numbers::pi).epsilon(1e-11));
    // empty interval
    CHECK(integrate([](double) { return 7.0; }, 2.0, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("integration of a sharply peaked integrand") {
    // Gaussian of width 1e-2 centered mid-interval; adaptive splitting required
    const double w = 1e-2;
    const double v = integrate(
        [w](double x) {
            double z = (x - 0.5) / w;
            return std::exp(-0.5 * z * z);
        },
        0.0, 1.0, 1e-10);
    CHECK(v == doctest::Approx(w * std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-9));
}

TEST_CASE("non-finite integrand raises ValidationError") {
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0),
                    ValidationError);
}

TEST_CASE("cumulative integral matches the antiderivative") {
    std::vector<double> nodes{0.0, 0.5, 1.0, 2.0, 3.5};
    auto cum = cumulative_integral([](double x) { return 3.0 * x * x; }, nodes);
    REQUIRE(cum.size() == nodes.size());
    CHECK(cum[0] == 0.0);
    for (std::size_t j = 1; j < nodes.size(); ++j)
        CHECK(cum[j] == doctest::Approx(std::pow(nodes[j], 3)).epsilon(1e-10));
}

TEST_CASE("trapezoid rules") {
    std::vector<double> x{0.0, 0.5, 1.0};
    std::vector<double> y{0.0, 0.5, 1.0};
    CHECK(trapezoid(x, y) == doctest::Approx(0.5));
    auto cum = cumulative_trapezoid(x, y);
    REQUIRE(cum.size() == 3);
    CHECK(cum[0] == 0.0);
    CHECK(cum[1] == doctest::Approx(0.125));
    CHECK(cum[2] == doctest::Approx(0.5));

    // non-uniform spacing, linear data stays exact
    std::vector<double> xn{0.0, 0.1, 0.35, 1.0};
    std::vector<double> yn{1.0, 1.2, 1.7, 3.0};  // y = 1 + 2x
    CHECK(trapezoid(xn, yn) == doctest::Approx(2.0).epsilon(1e-14));
}
