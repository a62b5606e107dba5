#include <cmath>

#include "bellman/errors.hpp"
#include "bellman/mollifier.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bellman;

TEST_CASE("Gauss-Legendre rules integrate polynomials of degree 2n-1 exactly") {
  for (std::size_t n : {2u, 5u, 8u, 16u}) {
    const QuadratureRule rule = gauss_legendre(n);
    REQUIRE(rule.nodes.size() == n);
    for (std::size_t k = 0; k <= 2 * n - 1; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], double(k));
      const double exact = k % 2 == 1 ? 0.0 : 2.0 / double(k + 1);
      CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("bump integral") {
  // Composite Simpson with 20000 intervals as an independent reference.
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double y = -1.0 + 2.0 * i / n;
    const double wgt = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    sum += wgt * bump(y);
  }
  sum *= 2.0 / n / 3.0;
  CHECK(bump_integral() == doctest::Approx(sum).epsilon(1e-9));
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(0.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("mollification reproduces affine functions and dominates convex ones") {
  const Exponents e(2, 6, 3);
  const BellmanModel model(coefficients_default(e), e);
  const Mollifier mol(0.01, 8);
  // Inside region 1 away from its walls A is a convex sum of powers.
  for (auto pt : {std::array<double, 3>{1, 2, 1.1}, {0.5, 1.5, 1.0}, {2, 3, 2}}) {
    const TriplePoint x(pt[0], pt[1], pt[2]);
    REQUIRE(classify_region(x, e) == Region::R1);
    const double a = model.eval_A(x);
    const double ae = mol.value(model, x);
    CHECK(ae >= a);
    CHECK(ae == doctest::Approx(a).epsilon(1e-3));
  }
}

TEST_CASE("mollified Hessian matches finite differences of the mollified gradient") {
  const Exponents e(2, 6, 3);
  const BellmanModel model(coefficients_default(e), e);
  const Mollifier mol(0.05, 8);
  for (auto pt : {std::array<double, 3>{1, 1, 1}, {1.2, 1.05, 1.1}, {0.8, 0.9, 0.7}}) {
    const TriplePoint x(pt[0], pt[1], pt[2]);
    const std::vector<double> xv{pt[0], pt[1], pt[2]};
    const Matrix3 h = mol.hessian(model, x);
    const Vector3 g = mol.gradient(model, x);
    const auto f = [&](const std::vector<double>& y) { return mol.value(model, {y[0], y[1], y[2]}); };
    for (std::size_t i = 0; i < 3; ++i) {
      const double scale = std::abs(g[i]) + mol.value(model, x) / xv[i];
      CHECK(std::abs(oracle::central_diff(f, xv, i, 1e-5) - g[i]) <= 1e-7 * scale);
      for (std::size_t j = 0; j < 3; ++j) {
        const auto gj = [&](const std::vector<double>& y) { return mol.gradient(model, {y[0], y[1], y[2]})[j]; };
        CHECK(std::abs(oracle::central_diff(gj, xv, i, 1e-7) - h(i, j)) <= 1e-3 * (h.norm() + 1));
      }
    }
  }
}

TEST_CASE("mollify_A converges in the node count and rejects small points") {
  const Exponents e(2, 6, 3);
  const Coefficients c = coefficients_default(e);
  // The bump is flat to all orders at +-1, so Gauss-Legendre converges slowly:
  // 16 nodes move by about 3e-8 on doubling, 24 nodes by about 2e-9.
  const MollifiedValue coarse = mollify_A(c, e, 0.05, {1, 2, 1.1}, 16);
  CHECK(coarse.quadrature_warning);
  const MollifiedValue fine = mollify_A(c, e, 0.05, {1, 2, 1.1}, 24);
  CHECK(fine.rel_change < kMollifierConvergenceTolerance);
  CHECK_FALSE(fine.quadrature_warning);
  for (std::size_t n : {8u, 16u, 32u}) {
    const MollifiedValue mv = mollify_A(c, e, 0.05, {1, 1, 1}, n);
    CHECK(mv.quadrature_warning == (mv.rel_change > kMollifierConvergenceTolerance));
    CHECK(mv.value == doctest::Approx(eval_A(c, e, {1, 1, 1})).epsilon(1e-2));
  }
  double prev_gap = INFINITY;
  for (double eps : {0.08, 0.04, 0.02}) {
    const double gap = std::abs(mollify_A(c, e, eps, {1, 1, 1}, 24).value - eval_A(c, e, {1, 1, 1}));
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK_THROWS_AS(mollify_A(c, e, 0.05, {0.05, 1, 1}, 16), DomainError);
  CHECK_THROWS_AS(mollify_A(c, e, 0.05, {1, 1, 1}, 4), ConstraintViolation);
  CHECK_THROWS_AS(Mollifier(0.0, 8), DomainError);
}
