#include <cmath>
#include <vector>

#include "bellman/errors.hpp"
#include "bellman/martingale.hpp"
#include "doctest.h"

using namespace bellman;

namespace {

// Ancestor of leaf i (at the tree depth) on the given level.
std::size_t ancestor(const Filtration& tree, std::size_t leaf, unsigned level) {
  std::size_t i = leaf;
  for (unsigned k = tree.depth(); k > level; --k) i = tree.parent(k, i);
  return i;
}

// E(terminal | F_k) at node i by summing leaf probabilities.
double brute_conditional(const Filtration& tree, const std::vector<double>& terminal, unsigned level, std::size_t i) {
  double num = 0.0, den = 0.0;
  for (std::size_t leaf = 0; leaf < terminal.size(); ++leaf) {
    if (ancestor(tree, leaf, level) != i) continue;
    num += tree.prob(tree.depth(), leaf) * terminal[leaf];
    den += tree.prob(tree.depth(), leaf);
  }
  return num / den;
}

// sum_k X_{k-1} (Y_k - Y_{k-1}) along the path of each level-n node.
double brute_paraproduct(const Filtration& tree, const Process& x, const Process& y, unsigned n, std::size_t node) {
  std::vector<std::size_t> path(n + 1);
  path[n] = node;
  for (unsigned k = n; k > 0; --k) path[k - 1] = tree.parent(k, path[k]);
  double s = 0.0;
  for (unsigned k = 1; k <= n; ++k) s += x[k - 1][path[k - 1]] * (y[k][path[k]] - y[k - 1][path[k - 1]]);
  return s;
}

}  // namespace

TEST_CASE("filtration validation") {
  CHECK_THROWS_AS(Filtration({{{0.5, 0.4}}}), ProbabilityError);
  CHECK_THROWS_AS(Filtration(std::vector<std::vector<std::vector<double>>>{{{}}}), ProbabilityError);
  CHECK_THROWS_AS(Filtration({{{1.5, -0.5}}}), ProbabilityError);
  CHECK_NOTHROW(Filtration({{{0.25, 0.75}}, {{1.0}, {0.5, 0.5}}}));
  const Filtration t({{{0.25, 0.75}}, {{1.0}, {0.5, 0.5}}});
  CHECK(t.depth() == 2);
  CHECK(t.size(2) == 3);
  CHECK(t.prob(2, 2) == 0.375);
  CHECK(t.parent(2, 0) == 0);
  CHECK(t.parent(2, 2) == 1);
  CHECK(Filtration::dyadic(3).uniform_dyadic());
  CHECK_FALSE(t.uniform_dyadic());
}

TEST_CASE("depth-one dyadic martingale from (2, 0)") {
  const Exponents e(2, 6, 3);
  const MartingaleTriple m = martingale_from_terminal(Filtration::dyadic(1), e, {2, 0}, {1, 1}, {3, 3});
  CHECK(m.x[0][0] == 1.0);
  CHECK(m.x[1][0] == 2.0);
  CHECK(m.x[1][1] == 0.0);
  CHECK(m.u[0][0] == 2.0);
  CHECK(m.y[0][0] == 1.0);
  CHECK(m.z[1][1] == 3.0);
  const std::vector<double> p = paraproduct_discrete(m.tree, m.x, m.y, 1);
  CHECK(p[0] == 0.0);
  CHECK(paraproduct_discrete(m.tree, m.x, m.x, 0)[0] == 0.0);
  CHECK(dual_identity_check(m.tree, m.x, m.y, m.z, 1).defect == 0.0);
  CHECK_THROWS_AS(martingale_from_terminal(Filtration::dyadic(1), e, {2, -1}, {1, 1}, {1, 1}), DomainError);
  CHECK_THROWS_AS(martingale_from_terminal(Filtration::dyadic(1), e, {2, 0, 1}, {1, 1}, {1, 1}), ConstraintViolation);
}

TEST_CASE("conditional expectations and paraproducts against brute force") {
  Rng rng(41);
  for (int n = 0; n < 20; ++n) {
    const Filtration tree = n % 2 ? Filtration::dyadic(5) : Filtration::random(rng, 4, 3);
    const std::size_t leaves = tree.size(tree.depth());
    const std::vector<double> xl = random_leaves(rng, leaves), yl = random_leaves(rng, leaves);
    const Process cx = conditional_expectations(tree, xl);
    const Process cy = conditional_expectations(tree, yl);
    for (unsigned k = 0; k <= tree.depth(); ++k) {
      for (std::size_t i = 0; i < tree.size(k); ++i) {
        CHECK(cx[k][i] == doctest::Approx(brute_conditional(tree, xl, k, i)).epsilon(1e-12));
      }
    }
    CHECK(martingale_defect(tree, cx) <= 1e-12 * (1 + cx[0][0]));
    for (unsigned level : {1u, tree.depth()}) {
      const std::vector<double> p = paraproduct_discrete(tree, cx, cy, level);
      REQUIRE(p.size() == tree.size(level));
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double want = brute_paraproduct(tree, cx, cy, level, i);
        CHECK(std::abs(p[i] - want) <= 1e-12 * (1 + std::abs(want) + cx[0][0] * 1e3));
      }
    }
  }
}

TEST_CASE("dual identity on random trees") {
  Rng rng(42);
  const Exponents e(2, 6, 3);
  for (int n = 0; n < 30; ++n) {
    const Filtration tree = n % 2 ? Filtration::dyadic(8) : Filtration::random(rng, 5, 3);
    const std::size_t leaves = tree.size(tree.depth());
    const MartingaleTriple m =
        martingale_from_terminal(tree, e, random_leaves(rng, leaves), random_leaves(rng, leaves), random_leaves(rng, leaves));
    const DualDefect d = dual_identity_check(m.tree, m.x, m.y, m.z, tree.depth());
    CHECK(d.defect <= 1e-12 * d.scale);
  }
  const MartingaleTriple flat = martingale_from_terminal(Filtration::dyadic(3), e, std::vector<double>(8, 2.0),
                                                         {1, 5, 2, 8, 0, 3, 1, 1}, std::vector<double>(8, 4.0));
  CHECK(dual_identity_check(flat.tree, flat.x, flat.y, flat.z, 3).defect == 0.0);
}

TEST_CASE("supermartingale steps and the dualized estimate") {
  Rng rng(43);
  const Exponents e(2, 6, 3);
  const Coefficients c = coefficients_default(e);
  const MartingaleTriple flat = martingale_from_terminal(Filtration::dyadic(2), e, std::vector<double>(4, 1.0),
                                                         std::vector<double>(4, 2.0), std::vector<double>(4, 3.0));
  for (const ScaledMargin& m : supermartingale_step_check(c, e, flat, 1)) CHECK(std::abs(m.margin) <= 1e-12 * m.scale);
  for (int n = 0; n < 30; ++n) {
    const Filtration tree = n % 2 ? Filtration::dyadic(6) : Filtration::random(rng, 4, 3);
    const std::size_t leaves = tree.size(tree.depth());
    const MartingaleTriple m =
        martingale_from_terminal(tree, e, random_leaves(rng, leaves), random_leaves(rng, leaves), random_leaves(rng, leaves));
    for (unsigned k = 1; k <= tree.depth(); ++k)
      for (const ScaledMargin& s : supermartingale_step_check(c, e, m, k)) CHECK(s.ok());
    const DualizedEstimate est = verify_estimate_dualized(c, e, m);
    CHECK(est.ok());
    CHECK(est.constant == (tree.uniform_dyadic() ? 114048.0 : 1.5 * 114048.0));
    CHECK(est.telescoping_margin <= est.young_margin + 1e-9 * est.scale);
  }
  const MartingaleTriple ycon = martingale_from_terminal(Filtration::dyadic(3), e, {1, 2, 3, 4, 5, 6, 7, 8},
                                                         std::vector<double>(8, 2.0), {8, 1, 1, 1, 3, 0, 1, 2});
  const DualizedEstimate est = verify_estimate_dualized(c, e, ycon);
  CHECK(est.paraproduct_mass == 0.0);
  CHECK(est.dual_value == 0.0);
}

TEST_CASE("signed estimate and paraproduct norm") {
  Rng rng(44);
  const Exponents e(2, 6, 3);
  const Coefficients c = coefficients_default(e);
  std::normal_distribution<double> n01;
  for (int n = 0; n < 10; ++n) {
    const Filtration tree = Filtration::dyadic(5);
    std::vector<double> xl(32), yl(32), zl(32);
    for (std::size_t i = 0; i < 32; ++i) {
      xl[i] = n01(rng);
      yl[i] = n01(rng);
      zl[i] = n01(rng);
    }
    const SignedDualizedEstimate s = verify_estimate_dualized_signed(c, e, tree, xl, yl, zl);
    CHECK(s.parts.size() == 8);
    CHECK(s.ok());
    CHECK(s.dual_value <= s.parts_bound);
    const ParaproductNorm pn = paraproduct_norm_check(c, e, tree, random_leaves(rng, 32), random_leaves(rng, 32));
    CHECK(pn.ok());
    CHECK(pn.dual_attained == doctest::Approx(pn.norm).epsilon(1e-10));
  }
}

TEST_CASE("Brownian Riemann sums") {
  BrownianGrid grid;
  grid.steps = 64;
  grid.paths = 20000;
  SUBCASE("X = 1 telescopes") {
    const RiemannReport r =
        brownian_riemann_approx(MartingaleGenerator::constant(1.0), MartingaleGenerator::brownian(), grid, 3, 2.0);
    for (const RiemannLevel& lv : r.levels) CHECK(lv.norm == doctest::Approx(r.direct_norm).epsilon(1e-12));
    CHECK(std::abs(r.levels.back().mean) <= 4 * r.levels.back().mean_stderr);
  }
  SUBCASE("X = Y = B approaches (B^2 - 1) / 2") {
    const RiemannReport r = brownian_riemann_approx(MartingaleGenerator::brownian(), MartingaleGenerator::brownian(),
                                                    grid, 4, 2.0, [](double b) { return 0.5 * (b * b - 1); });
    REQUIRE(r.levels.size() == 4);
    CHECK(r.levels.front().steps == 8);
    CHECK(r.levels.back().steps == 64);
    for (const RiemannLevel& lv : r.levels) {
      const double expected = 1.0 / (2.0 * static_cast<double>(lv.steps));
      CHECK(std::abs(lv.ref_mean) <= 4 * lv.ref_mean_stderr);
      CHECK(std::abs(lv.ref_variance - expected) <= 4 * lv.ref_variance_stderr);
    }
    const RiemannLevel& fine = r.levels.back();
    CHECK(std::abs(fine.variance - 0.5) <= 4 * fine.variance_stderr + 1.0 / 64);
  }
  SUBCASE("a non-martingale is rejected") {
    const auto sq = MartingaleGenerator::custom("B^2", [](double, double b) { return b * b; });
    CHECK_THROWS_AS(brownian_riemann_approx(MartingaleGenerator::brownian(), sq, grid, 2, 2.0), SimulationError);
  }
  SUBCASE("thread count does not change the statistics") {
    const auto g = MartingaleGenerator::exponential(0.5);
    const RiemannReport a = brownian_riemann_approx(g, MartingaleGenerator::brownian(), grid, 2, 2.0, {}, 1);
    const RiemannReport b = brownian_riemann_approx(g, MartingaleGenerator::brownian(), grid, 2, 2.0, {}, 3);
    CHECK(a.levels.back().mean == b.levels.back().mean);
    CHECK(a.levels.back().variance == b.levels.back().variance);
  }
  CHECK_THROWS_AS(brownian_riemann_approx(MartingaleGenerator::brownian(), MartingaleGenerator::brownian(), grid, 8, 2.0),
                  ConstraintViolation);
}

TEST_CASE("small martingale suite passes") {
  const Exponents e(3, 6, 2);
  MartingaleSuiteConfig config;
  config.samples = 300;
  config.depth = 5;
  config.general_depth = 3;
  for (const PropertyResult& r : run_martingale_suite(coefficients_default(e), e, config)) {
    INFO(r.name);
    CHECK(r.passed());
  }
}
