#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "reldiff/common.hpp"
#include "reldiff/expression.hpp"

using reldiff::Expression;
using reldiff::ValidationError;

TEST_CASE("literals and the variable") {
    CHECK(Expression::parse("3.5")(0.0) == doctest::Approx(3.5));
    CHECK(Expression::parse("1e-3")(7.0) == doctest::Approx(1e-3));
    CHECK(Expression::parse("2E2")(0.0) == doctest::Approx(200.0));
    CHECK(Expression::parse(".25")(0.0) == doctest::Approx(0.25));
    CHECK(Expression::parse("r")(2.0) == doctest::Approx(2.0));
    CHECK(Expression::parse(" 1 + 2 * r ")(3.0) == doctest::Approx(7.0));
}

TEST_CASE("precedence and associativity") {
    CHECK(Expression::parse("2+3*4")(0.0) == doctest::Approx(14.0));
    CHECK(Expression::parse("(2+3)*4")(0.0) == doctest::Approx(20.0));
    CHECK(Expression::parse("2*3^2")(0.0) == doctest::Approx(18.0));
    // right-associative power
    CHECK(Expression::parse("2^3^2")(0.0) == doctest::Approx(512.0));
    CHECK(Expression::parse("8/4/2")(0.0) == doctest::Approx(1.0));
    CHECK(Expression::parse("1-2-3")(0.0) == doctest::Approx(-4.0));
    // unary minus binds tighter than the power: -2^2 = (-2)^2
    CHECK(Expression::parse("-2^2")(0.0) == doctest::Approx(4.0));
    CHECK(Expression::parse("--2")(0.0) == doctest::Approx(2.0));
}

TEST_CASE("functions") {
    CHECK(Expression::parse("sqrt(1+r*r)")(2.0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(Expression::parse("exp(-r)")(1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(Expression::parse("sqrt(2)")(0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(Expression::parse("exp(0)")(0.0) == doctest::Approx(1.0));
}

TEST_CASE("model coefficient shapes evaluate correctly") {
    auto roup = Expression::parse("1/sqrt(1+r^2)");
    for (double r : {0.0, 0.5, 1.0, 3.0, 10.0})
        CHECK(roup(r) == doctest::Approx(1.0 / std::sqrt(1.0 + r * r)).epsilon(1e-14));

    auto dh_b = Expression::parse("1-(3/1)/sqrt(1+r^2)");
    CHECK(dh_b(0.0) == doctest::Approx(-2.0));
    CHECK(dh_b(10.0) == doctest::Approx(1.0 - 3.0 / std::sqrt(101.0)));

    auto dh_sigma = Expression::parse("sqrt(2*sqrt(1+r^2))");
    CHECK(dh_sigma(3.0) == doctest::Approx(std::sqrt(2.0 * std::sqrt(10.0))));
}

TEST_CASE("text is preserved") {
    auto e = Expression::parse("1/(1+r^2)");
    CHECK(e.text() == "1/(1+r^2)");
}

TEST_CASE("malformed input is rejected") {
    CHECK_THROWS_AS(Expression::parse(""), ValidationError);
    CHECK_THROWS_AS(Expression::parse("2+"), ValidationError);
    CHECK_THROWS_AS(Expression::parse("sqrt("), ValidationError);
    CHECK_THROWS_AS(Expression::parse("sqrt(2"), ValidationError);
    CHECK_THROWS_AS(Expression::parse("foo(r)"), ValidationError);
    CHECK_THROWS_AS(Expression::parse("x"), ValidationError);
    CHECK_THROWS_AS(Expression::parse("(1+2"), ValidationError);
    CHECK_THROWS_AS(Expression::parse("1 2"), ValidationError);
    CHECK_THROWS_AS(Expression::parse("1..2"), ValidationError);
}
