#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "reldiff/phase_space.hpp"

using namespace reldiff;

TEST_CASE("make_phase_point derives the energy from the momentum") {
    auto pt = make_phase_point({0.0, 0.0, 0.0}, {3.0, 0.0, 4.0});
    CHECK(pt.dim() == 3);
    CHECK(pt.p0 == doctest::Approx(std::sqrt(26.0)).epsilon(1e-15));
    CHECK(pt.p0 * pt.p0 - 25.0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pt.t == 0.0);
    CHECK(pt.s == 0.0);

    auto pt2 = make_phase_point({1.0}, {0.5}, 2.0, 1.5);
    CHECK(pt2.t == 2.0);
    CHECK(pt2.s == 1.5);
    CHECK(pt2.p0 == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("make_phase_point rejects malformed input") {
    CHECK_THROWS_AS(make_phase_point({0.0}, {0.0, 0.0}), ValidationError);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(make_phase_point({0.0}, {inf}), ValidationError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(make_phase_point({nan}, {0.0}), ValidationError);
}

TEST_CASE("rest_state is the unit-energy origin") {
    for (int d : {1, 2, 3, 5}) {
        auto pt = rest_state(d);
        CHECK(pt.dim() == d);
        CHECK(pt.p0 == 1.0);
        for (double c : pt.p) CHECK(c == 0.0);
        for (double c : pt.x) CHECK(c == 0.0);
    }
    CHECK_THROWS_AS(rest_state(0), ValidationError);
}

TEST_CASE("lift produces subluminal velocities") {
    auto lf = lift({3.0, 4.0});
    CHECK(lf.p0 == doctest::Approx(std::sqrt(26.0)));
    CHECK(lf.velocity[0] == doctest::Approx(3.0 / std::sqrt(26.0)));
    CHECK(lf.velocity[1] == doctest::Approx(4.0 / std::sqrt(26.0)));

    // large momenta stay strictly below light speed; 1e6 keeps 1 + r^2
    // exactly representable so p0 > |p| survives the rounding
    auto fast = lift({1e6, 0.0, 0.0});
    CHECK(norm(fast.velocity) < 1.0);
    CHECK(norm(fast.velocity) == doctest::Approx(1.0).epsilon(1e-10));

    auto rest = lift({0.0, 0.0});
    CHECK(rest.p0 == 1.0);
    CHECK(norm(rest.velocity) == 0.0);
}

TEST_CASE("spherical decomposition roundtrips") {
    std::vector<double> p{1.0, -2.0, 2.0};
    auto sph = to_spherical(p);
    CHECK(sph.r == doctest::Approx(3.0));
    CHECK(!sph.degenerate);
    CHECK(norm(sph.theta) == doctest::Approx(1.0).epsilon(1e-15));
    auto back = from_spherical(sph);
    for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(back[i] == doctest::Approx(p[i]).epsilon(1e-15));
}

TEST_CASE("degenerate direction is the first basis vector") {
    auto sph = to_spherical({0.0, 0.0, 0.0});
    CHECK(sph.degenerate);
    CHECK(sph.r == 0.0);
    CHECK(sph.theta[0] == 1.0);
    CHECK(sph.theta[1] == 0.0);
    CHECK(sph.theta[2] == 0.0);
}

TEST_CASE("norm and energy helpers") {
    CHECK(norm({3.0, 4.0}) == doctest::Approx(5.0));
    CHECK(energy({0.0, 0.0}) == 1.0);
    CHECK(energy({1.0, 2.0, 2.0}) == doctest::Approx(std::sqrt(10.0)));
}
