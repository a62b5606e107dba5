#include <array>
#include <cmath>
#include <cstdint>

#include "bellman/errors.hpp"
#include "bellman/exponents.hpp"
#include "doctest.h"

using namespace bellman;

TEST_CASE("valid and invalid exponent triples") {
  CHECK_NOTHROW(Exponents(2, 6, 3));
  CHECK_NOTHROW(Exponents(3, 6, 2));
  CHECK_NOTHROW(Exponents(4, 8, 1.6));
  CHECK_THROWS_AS(Exponents(3, 3, 3), ConstraintViolation);
  CHECK_THROWS_AS(Exponents(2, 4, 4), ConstraintViolation);
  CHECK_THROWS_AS(Exponents(2, 6, 4), ConstraintViolation);
  CHECK_THROWS_AS(Exponents(1, 6, 3), ConstraintViolation);
  CHECK_THROWS_AS(Exponents(2, 3, 6), ConstraintViolation);
  CHECK_THROWS_AS(Exponents(NAN, 6, 3), ConstraintViolation);
  CHECK_THROWS_AS(Exponents(2, INFINITY, 3), ConstraintViolation);
}

TEST_CASE("the violated invariant is named") {
  try {
    Exponents(3, 3, 3);
    FAIL("expected a violation");
  } catch (const ConstraintViolation& ex) {
    CHECK(std::string(ex.what()).find("q > r") != std::string::npos);
  }
}

TEST_CASE("coefficients must be positive") {
  CHECK_THROWS_AS(Coefficients(0, 1, 1), ConstraintViolation);
  CHECK_THROWS_AS(Coefficients(1, -1, 1), ConstraintViolation);
  CHECK_THROWS_AS(Coefficients(1, 1, INFINITY), ConstraintViolation);
}

TEST_CASE("default coefficients at (2, 6, 3) match integer arithmetic") {
  const std::int64_t p = 2, q = 6, r = 3;
  const std::int64_t a_num = 88 * q * q * q * q * r, a_den = (p - 1) * (r - 1) * (q - r);
  const std::int64_t c_num = 11 * q * q * q * r, c_den = (r - 1) * (q - r);
  REQUIRE(a_num % a_den == 0);
  REQUIRE(c_num % c_den == 0);
  const Exponents e(2, 6, 3);
  const Coefficients d = coefficients_default(e);
  CHECK(d.a() == static_cast<double>(a_num / a_den));
  CHECK(d.b() == 1.0);
  CHECK(d.c() == static_cast<double>(c_num / c_den));
  CHECK(d.a() == 57024.0);
  CHECK(d.c() == 1188.0);
  CHECK(c_constant(d, e) == 114048.0);
  CHECK(c_constant_default_closed_form(e) == 114048.0);
}

TEST_CASE("closed form of the constant agrees with max{Ap, Bq, Cr}") {
  for (auto [p, q, r] : {std::array<double, 3>{2, 6, 3}, {3, 6, 2}, {4, 8, 1.6}, {1.5, 12, 4}}) {
    const Exponents e(p, q, r);
    const Coefficients d = coefficients_default(e);
    CHECK(c_constant(d, e) == doctest::Approx(c_constant_default_closed_form(e)).epsilon(1e-14));
    CHECK(c_constant(d, e) == doctest::Approx(d.a() * p).epsilon(1e-15));
  }
  CHECK(c_constant(coefficients_default(Exponents(3, 6, 2)), Exponents(3, 6, 2)) == 85536.0);
}

TEST_CASE("constant is the maximum of the three products") {
  const Exponents e(2, 6, 3);
  CHECK(c_constant(Coefficients(1, 1, 1), e) == 6.0);
  CHECK(c_constant(Coefficients(1, 1, 10), e) == 30.0);
  CHECK(c_constant(Coefficients(100, 1, 10), e) == 200.0);
  CHECK(c_constant(Coefficients(1, 1, 1).scaled(3), e) == 18.0);
}

TEST_CASE("circled lower bounds") {
  const Exponents e(2, 6, 3);
  CHECK(circled_lower_bound_c(e, 1.0) == doctest::Approx(0.5));
  CHECK(circled_lower_bound_a(e, 1.0) == doctest::Approx(1.5));
  CHECK(satisfies_circled_conditions(coefficients_default(e), e));
  CHECK_FALSE(satisfies_circled_conditions(Coefficients(1, 1, 1), e));
  CHECK_FALSE(satisfies_circled_conditions(Coefficients(2, 1, 0.4), e));
  CHECK(satisfies_circled_conditions(Coefficients(1.5, 1, 0.5), e));
}
