#include <array>
#include <cmath>
#include <random>

#include "bellman/bellman_function.hpp"
#include "bellman/errors.hpp"
#include "bellman/parallel.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bellman;

namespace {

const std::array<std::array<double, 3>, 3> kTriples{{{2, 6, 3}, {3, 6, 2}, {4, 8, 1.6}}};

// Point of a prescribed region: u^p = 1, (v^q, w^r) = (t, s).
TriplePoint from_gamma(const Exponents& e, double u, double t, double s) {
  const double up = std::pow(u, e.p());
  return {u, std::pow(t * up, 1 / e.q()), std::pow(s * up, 1 / e.r())};
}

}  // namespace

TEST_CASE("A at (1, 1, 1) for (2, 6, 3) is A + B + C") {
  const Exponents e(2, 6, 3);
  const Coefficients c = coefficients_default(e);
  CHECK(eval_A(c, e, {1, 1, 1}) == 58213.0);
  CHECK(classify_region({1, 1, 1}, e) == Region::Boundary);
}

TEST_CASE("eval_A matches the transcribed six-branch formula") {
  Rng rng(11);
  for (auto [p, q, r] : kTriples) {
    const Exponents e(p, q, r);
    const Coefficients c = coefficients_default(e);
    const BellmanModel model(c, e);
    for (int i = 0; i < 3000; ++i) {
      const double u = log_uniform(rng, 1e-3, 1e3), v = log_uniform(rng, 1e-3, 1e3), w = log_uniform(rng, 1e-3, 1e3);
      const double want = oracle::explicit_A(c, e, u, v, w);
      CHECK(model.eval_A({u, v, w}) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("A on the coordinate planes is the continuous limit") {
  const Exponents e(2, 6, 3);
  const BellmanModel model(coefficients_default(e), e);
  for (auto pt : {std::array<double, 3>{0, 1, 2}, {1, 0, 2}, {1, 2, 0}, {0, 0, 3}, {0, 0, 0}, {2, 0, 0}}) {
    const double at = model.eval_A({pt[0], pt[1], pt[2]});
    const double near = model.eval_A({pt[0] + 1e-12, pt[1] + 1e-12, pt[2] + 1e-12});
    CHECK(at == doctest::Approx(near).epsilon(1e-6));
    CHECK(at >= 0.0);
  }
  CHECK(model.eval_A({0, 0, 0}) == 0.0);
}

TEST_CASE("gamma reproduces A / u^p") {
  Rng rng(12);
  for (auto [p, q, r] : kTriples) {
    const Exponents e(p, q, r);
    const BellmanModel model(coefficients_default(e), e);
    for (int i = 0; i < 2000; ++i) {
      const double u = log_uniform(rng, 1e-2, 1e2), t = log_uniform(rng, 1e-3, 1e3), s = log_uniform(rng, 1e-3, 1e3);
      const TriplePoint x = from_gamma(e, u, t, s);
      const double lhs = model.eval_A(x);
      const double rhs = std::pow(u, p) * model.eval_gamma({t, s});
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("gradient and Hessian agree with finite differences") {
  Rng rng(13);
  for (auto [p, q, r] : kTriples) {
    const Exponents e(p, q, r);
    const BellmanModel model(coefficients_default(e), e);
    int tested = 0;
    while (tested < 300) {
      const double u = log_uniform(rng, 0.1, 10), v = log_uniform(rng, 0.1, 10), w = log_uniform(rng, 0.1, 10);
      const TriplePoint x(u, v, w);
      if (!hessian_safe(x, e, 1e-3)) continue;
      ++tested;
      const std::vector<double> xv{u, v, w};
      const auto f = [&](const std::vector<double>& y) { return model.eval_A({y[0], y[1], y[2]}); };
      const Vector3 g = model.grad_A(x);
      const Matrix3 h = model.hess_A(x);
      for (std::size_t i = 0; i < 3; ++i) {
        const double step = 1e-6 * xv[i];
        const double scale = std::abs(g[i]) + model.eval_A(x) / xv[i];
        CHECK(std::abs(oracle::central_diff(f, xv, i, step) - g[i]) <= 1e-6 * scale);
        for (std::size_t j = 0; j < 3; ++j) {
          const auto gj = [&](const std::vector<double>& y) { return model.grad_A({y[0], y[1], y[2]})[j]; };
          const double hs = std::abs(h(i, j)) + scale / xv[j];
          CHECK(std::abs(oracle::central_diff(gj, xv, i, step) - h(i, j)) <= 1e-5 * hs);
        }
      }
      CHECK((h - h.transpose()).norm() <= 1e-12 * h.norm());
    }
  }
}

TEST_CASE("the two u-derivatives across u^p = v^q coincide on the surface") {
  // Region 5 and region 6 formulas for dA/du, written out directly.
  const double p = 2, q = 6, r = 3;
  const Exponents e(p, q, r);
  const Coefficients c = coefficients_default(e);
  const double A = c.a(), B = c.b();
  const BellmanModel model(c, e);
  for (double u : {0.3, 1.0, 2.5}) {
    const double v = std::pow(std::pow(u, p), 1 / q);
    const double w = 1.5 * std::pow(std::pow(u, p), 1 / r);  // w^r > u^p = v^q
    const double r5 = (2 * A * r * p * (p - 1) - B * p * (q + r)) / (2 * r * (p - 1)) * std::pow(u, p - 1) +
                      B * q / 2 * std::pow(u, p / r - p / q) * v * v;
    const double r6 = A * p * std::pow(u, p - 1);
    CHECK(r5 == doctest::Approx(r6).epsilon(1e-12));
    CHECK(model.grad_A_branch(Region::R5, {u, v, w})[0] == doctest::Approx(r6).epsilon(1e-12));
    CHECK(model.grad_A_branch(Region::R6, {u, v, w})[0] == doctest::Approx(r6).epsilon(1e-12));
  }
}

TEST_CASE("dA/dw vanishes as w -> 0 in region 4") {
  const Exponents e(2, 6, 3);
  const BellmanModel model(coefficients_default(e), e);
  double prev = INFINITY, first = 0.0;
  for (double w : {1e-1, 1e-3, 1e-5, 1e-7}) {
    const double v = 0.5 * std::pow(std::pow(w, 3.0), 1.0 / 6.0);  // v^q < w^r
    const double dw = model.grad_A({2.0, v, w})[2];
    CHECK(dw >= 0.0);
    CHECK(dw < prev);
    if (first == 0.0) first = dw;
    prev = dw;
  }
  CHECK(model.grad_A({2.0, 0.0, 0.0})[2] == 0.0);
  CHECK(prev < 1e-2 * first);
}

TEST_CASE("0 <= A <= A u^p + B v^q + C w^r") {
  Rng rng(14);
  for (auto [p, q, r] : kTriples) {
    const Exponents e(p, q, r);
    const Coefficients c = coefficients_default(e);
    for (int i = 0; i < 5000; ++i) {
      const double u = log_uniform(rng, 1e-3, 1e3), v = log_uniform(rng, 1e-3, 1e3), w = log_uniform(rng, 1e-3, 1e3);
      const double a = eval_A(c, e, {u, v, w});
      const double top = c.a() * std::pow(u, p) + c.b() * std::pow(v, q) + c.c() * std::pow(w, r);
      CHECK(a >= 0.0);
      CHECK(a <= top * (1 + 1e-12));
    }
  }
}

TEST_CASE("region classification") {
  const Exponents e(2, 6, 3);
  // (t, s) = (v^q / u^p, w^r / u^p).
  CHECK(classify_region(from_gamma(e, 1, 4, 2), e) == Region::R1);
  CHECK(classify_region(from_gamma(e, 1, 4, 0.5), e) == Region::R2);
  CHECK(classify_region(from_gamma(e, 1, 0.5, 0.25), e) == Region::R3);
  CHECK(classify_region(from_gamma(e, 1, 0.25, 0.5), e) == Region::R4);
  CHECK(classify_region(from_gamma(e, 1, 0.5, 2), e) == Region::R5);
  CHECK(classify_region(from_gamma(e, 1, 2, 4), e) == Region::R6);
  CHECK(classify_region(from_gamma(e, 1, 2, 2), e) == Region::Boundary);
  CHECK(dispatch_region({1, 1, 1}, e) == Region::R1);
  CHECK(classify_gamma_region({4, 2}) == Region::R1);
  CHECK(classify_gamma_region({1, 3}) == Region::Boundary);
  CHECK_THROWS_AS(classify_region({0, 1, 1}, e), DomainError);
  CHECK_THROWS_AS(TriplePoint(-1, 1, 1), DomainError);
  CHECK_THROWS_AS(GammaPoint(0, 1), DomainError);
}

TEST_CASE("Bellman point domain has no tolerance") {
  const Exponents e(2, 6, 3);
  CHECK_NOTHROW(BellmanPoint(e, 2, 1, 1, 4, 1, 1));
  CHECK_THROWS_AS(BellmanPoint(e, 2, 1, 1, std::nextafter(4.0, 0.0), 1, 1), DomainError);
  CHECK_THROWS_AS(BellmanPoint(e, 1, 1, 1, 1, 1, -1), DomainError);
}

TEST_CASE("B is the linear part minus A, with matching derivatives") {
  const Exponents e(2, 6, 3);
  const Coefficients c = coefficients_default(e);
  const BellmanModel model(c, e);
  const BellmanPoint x(e, 0.7, 1.3, 0.9, 1.0, 6.0, 2.0);
  const double lin = 114048.0 * (1.0 / 2 + 6.0 / 6 + 2.0 / 3);
  CHECK(model.linear_part(x) == doctest::Approx(lin).epsilon(1e-15));
  CHECK(model.eval_B(x) == doctest::Approx(lin - model.eval_A(x.triple())).epsilon(1e-15));
  const Vector6 g = model.grad_B(x);
  const Vector3 ga = model.grad_A(x.triple());
  for (int i = 0; i < 3; ++i) CHECK(g[i] == doctest::Approx(-ga[i]));
  CHECK(g[3] == doctest::Approx(114048.0 / 2));
  CHECK(g[4] == doctest::Approx(114048.0 / 6));
  CHECK(g[5] == doctest::Approx(114048.0 / 3));
  const Matrix6 h = model.hess_B(x);
  CHECK(h.block<3, 3>(3, 0).norm() == 0.0);
  CHECK(h.block<3, 3>(3, 3).norm() == 0.0);
  CHECK((h.block<3, 3>(0, 0) + model.hess_A(x.triple())).norm() <= 1e-12 * h.norm());
  CHECK(eval_B(c, e, BellmanPoint(e, 1, 1, 1, 1, 1, 1.5)) == doctest::Approx(114048.0 * (1.0 / 2 + 1.0 / 6 + 1.5 / 3) - 58213.0));
}

TEST_CASE("Hessian near a critical surface is refused") {
  const Exponents e(2, 6, 3);
  const BellmanModel model(coefficients_default(e), e);
  CHECK_THROWS_AS(model.hess_A({1, 1, 1}), BoundaryError);
  CHECK_THROWS_AS(model.hess_A(from_gamma(e, 1, 2, 2 * (1 + 1e-9))), BoundaryError);
  CHECK_NOTHROW(model.hess_A(from_gamma(e, 1, 4, 2)));
}
