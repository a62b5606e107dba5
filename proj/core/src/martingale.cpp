#include "bellman/martingale.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "bellman/errors.hpp"

namespace bellman {

Filtration::Filtration(const std::vector<std::vector<std::vector<double>>>& branch_probs) : branch_(branch_probs) {
  parent_.push_back({0});
  edge_.push_back({1.0});
  prob_.push_back({1.0});
  for (std::size_t k = 0; k < branch_probs.size(); ++k) {
    if (branch_probs[k].size() != parent_[k].size()) {
      throw ProbabilityError("level " + std::to_string(k) + " lists child probabilities for " +
                             std::to_string(branch_probs[k].size()) + " nodes, expected " +
                             std::to_string(parent_[k].size()));
    }
    std::vector<std::size_t> par;
    std::vector<double> edge, prob;
    for (std::size_t i = 0; i < branch_probs[k].size(); ++i) {
      const auto& ps = branch_probs[k][i];
      if (ps.empty()) throw ProbabilityError("node without children");
      double sum = 0.0;
      for (double p : ps) {
        if (!(p > 0.0 && p <= 1.0)) throw ProbabilityError("edge probability outside (0, 1]");
        sum += p;
        par.push_back(i);
        edge.push_back(p);
        prob.push_back(prob_[k][i] * p);
      }
      if (std::abs(sum - 1.0) > 1e-12) throw ProbabilityError("child probabilities do not sum to 1");
    }
    parent_.push_back(std::move(par));
    edge_.push_back(std::move(edge));
    prob_.push_back(std::move(prob));
  }
  dyadic_ = std::all_of(branch_probs.begin(), branch_probs.end(), [](const auto& level) {
    return std::all_of(level.begin(), level.end(),
                       [](const auto& ps) { return ps.size() == 2 && ps[0] == 0.5 && ps[1] == 0.5; });
  });
}

Filtration Filtration::dyadic(unsigned depth) {
  std::vector<std::vector<std::vector<double>>> b(depth);
  for (unsigned k = 0; k < depth; ++k) b[k].assign(std::size_t{1} << k, {0.5, 0.5});
  return Filtration(b);
}

Filtration Filtration::random(Rng& rng, unsigned depth, unsigned max_branching) {
  if (max_branching < 1) throw ConstraintViolation("max_branching must be >= 1");
  std::exponential_distribution<double> ex(1.0);
  std::vector<std::vector<std::vector<double>>> b(depth);
  std::size_t width = 1;
  for (unsigned k = 0; k < depth; ++k) {
    std::size_t next = 0;
    for (std::size_t i = 0; i < width; ++i) {
      const unsigned n = 1 + static_cast<unsigned>(uniform01(rng) * max_branching) % max_branching;
      std::vector<double> ps(n);
      double sum = 0.0;
      for (double& p : ps) sum += (p = 0.05 + ex(rng));
      for (double& p : ps) p /= sum;
      b[k].push_back(std::move(ps));
      next += n;
    }
    width = next;
  }
  return Filtration(b);
}

Process conditional_expectations(const Filtration& tree, const std::vector<double>& terminal) {
  const unsigned n = tree.depth();
  if (terminal.size() != tree.size(n)) throw ConstraintViolation("terminal values do not match the leaves");
  Process out(n + 1);
  out[n] = terminal;
  for (unsigned k = n; k-- > 0;) {
    out[k].assign(tree.size(k), 0.0);
    for (std::size_t i = 0; i < tree.size(k + 1); ++i) {
      out[k][tree.parent(k + 1, i)] += tree.edge_prob(k + 1, i) * out[k + 1][i];
    }
  }
  return out;
}

namespace {

std::vector<double> powered(const std::vector<double>& v, double e) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [&](double x) { return std::pow(x, e); });
  return out;
}

// Node weights times values, reduced pairwise.
double expectation(const Filtration& tree, unsigned level, const std::vector<double>& values) {
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = tree.prob(level, i) * values[i];
  return pairwise_sum(terms);
}

// Conditional moments can fall a rounding error below the power of the
// conditional mean; lift them back onto the domain boundary.
double domain_lift(double big, double small_power) {
  if (big < small_power && small_power - big <= 1e-12 * small_power) return small_power;
  return big;
}

BellmanPoint node_point(const Exponents& e, const MartingaleTriple& m, unsigned k, std::size_t i) {
  const double x = m.x[k][i], y = m.y[k][i], z = m.z[k][i];
  return BellmanPoint(e, x, y, z, domain_lift(m.u[k][i], std::pow(x, e.p())),
                      domain_lift(m.v[k][i], std::pow(y, e.q())), domain_lift(m.w[k][i], std::pow(z, e.r())));
}

double lp_norm(const Filtration& tree, const std::vector<double>& leaf, double e) {
  std::vector<double> a(leaf.size());
  for (std::size_t i = 0; i < leaf.size(); ++i) a[i] = std::pow(std::abs(leaf[i]), e);
  return std::pow(expectation(tree, tree.depth(), a), 1.0 / e);
}

}  // namespace

MartingaleTriple martingale_from_terminal(const Filtration& tree, const Exponents& e, const std::vector<double>& x_leaf,
                                          const std::vector<double>& y_leaf, const std::vector<double>& z_leaf) {
  for (const auto* leaves : {&x_leaf, &y_leaf, &z_leaf}) {
    for (double v : *leaves) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("terminal values must be finite and >= 0");
    }
  }
  MartingaleTriple m{tree, {}, {}, {}, {}, {}, {}};
  m.x = conditional_expectations(tree, x_leaf);
  m.y = conditional_expectations(tree, y_leaf);
  m.z = conditional_expectations(tree, z_leaf);
  m.u = conditional_expectations(tree, powered(x_leaf, e.p()));
  m.v = conditional_expectations(tree, powered(y_leaf, e.q()));
  m.w = conditional_expectations(tree, powered(z_leaf, e.r()));
  return m;
}

double martingale_defect(const Filtration& tree, const Process& x) {
  double worst = 0.0;
  for (unsigned k = 1; k <= tree.depth(); ++k) {
    std::vector<double> cond(tree.size(k - 1), 0.0);
    for (std::size_t i = 0; i < tree.size(k); ++i) cond[tree.parent(k, i)] += tree.edge_prob(k, i) * x[k][i];
    for (std::size_t j = 0; j < cond.size(); ++j) worst = std::max(worst, std::abs(cond[j] - x[k - 1][j]));
  }
  return worst;
}

std::vector<double> paraproduct_discrete(const Filtration& tree, const Process& x, const Process& y, unsigned n) {
  if (n > tree.depth()) throw ConstraintViolation("paraproduct time exceeds the tree depth");
  std::vector<double> acc{0.0};
  for (unsigned k = 1; k <= n; ++k) {
    std::vector<double> next(tree.size(k));
    for (std::size_t i = 0; i < next.size(); ++i) {
      const std::size_t j = tree.parent(k, i);
      next[i] = acc[j] + x[k - 1][j] * (y[k][i] - y[k - 1][j]);
    }
    acc = std::move(next);
  }
  return acc;
}

DualDefect dual_identity_check(const Filtration& tree, const Process& x, const Process& y, const Process& z,
                               unsigned n) {
  const std::vector<double> para = paraproduct_discrete(tree, x, y, n);
  std::vector<double> lhs(para.size()), lhs_mag(para.size());
  for (std::size_t i = 0; i < para.size(); ++i) {
    lhs[i] = para[i] * z[n][i];
    lhs_mag[i] = std::abs(lhs[i]);
  }
  std::vector<double> rhs_terms, rhs_mag;
  for (unsigned k = 1; k <= n; ++k) {
    std::vector<double> t(tree.size(k)), tm(tree.size(k));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::size_t j = tree.parent(k, i);
      t[i] = x[k - 1][j] * (y[k][i] - y[k - 1][j]) * (z[k][i] - z[k - 1][j]);
      // Rounding leaves E(dY | F) at the level of |Y|, so the cancelled
      // cross terms are bounded by |X| |Y| |Z| rather than |X| |dY| |Z|.
      tm[i] = std::abs(x[k - 1][j]) * (std::abs(y[k][i]) + std::abs(y[k - 1][j])) *
              (std::abs(z[k][i]) + std::abs(z[k - 1][j]));
    }
    rhs_terms.push_back(expectation(tree, k, t));
    rhs_mag.push_back(expectation(tree, k, tm));
  }
  const double l = expectation(tree, n, lhs);
  const double r = pairwise_sum(rhs_terms);
  return {std::abs(l - r), 1.0 + expectation(tree, n, lhs_mag) + pairwise_sum(rhs_mag)};
}

std::vector<ScaledMargin> supermartingale_step_check(const Coefficients& c, const Exponents& e,
                                                     const MartingaleTriple& m, unsigned k) {
  const Filtration& tree = m.tree;
  if (k < 1 || k > tree.depth()) throw ConstraintViolation("supermartingale step needs 1 <= k <= depth");
  const BellmanModel model(c, e);
  auto bellman = [&](unsigned level, std::size_t i, double& mag) {
    const BellmanPoint pt = node_point(e, m, level, i);
    const double lin = model.linear_part(pt), a = model.eval_A(pt.triple());
    mag = std::abs(lin) + std::abs(a);
    return lin - a;
  };
  const std::size_t parents = tree.size(k - 1);
  std::vector<double> parent_b(parents), parent_mag(parents), child_b(parents, 0.0), child_mag(parents, 0.0),
      para(parents, 0.0);
  for (std::size_t j = 0; j < parents; ++j) parent_b[j] = bellman(k - 1, j, parent_mag[j]);
  for (std::size_t i = 0; i < tree.size(k); ++i) {
    const std::size_t j = tree.parent(k, i);
    const double p = tree.edge_prob(k, i);
    double mag = 0.0;
    child_b[j] += p * bellman(k, i, mag);
    child_mag[j] += p * mag;
    para[j] += p * m.x[k - 1][j] * std::abs(m.y[k][i] - m.y[k - 1][j]) * std::abs(m.z[k][i] - m.z[k - 1][j]);
  }
  std::vector<ScaledMargin> out(parents);
  for (std::size_t j = 0; j < parents; ++j) {
    const double rhs = (2.0 / 3.0) * para[j];
    out[j] = {parent_b[j] - child_b[j] - rhs, 1.0 + parent_mag[j] + child_mag[j] + rhs};
  }
  return out;
}

DualizedEstimate verify_estimate_dualized(const Coefficients& c, const Exponents& e, const MartingaleTriple& m) {
  const Filtration& tree = m.tree;
  const unsigned n = tree.depth();
  const BellmanModel model(c, e);
  DualizedEstimate r;

  std::vector<double> mass;
  for (unsigned k = 1; k <= n; ++k) {
    std::vector<double> t(tree.size(k));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::size_t j = tree.parent(k, i);
      t[i] = m.x[k - 1][j] * std::abs(m.y[k][i] - m.y[k - 1][j]) * std::abs(m.z[k][i] - m.z[k - 1][j]);
    }
    mass.push_back(expectation(tree, k, t));
  }
  r.paraproduct_mass = pairwise_sum(mass);
  const double cc = model.c_constant();
  r.young_bound = cc * (m.u[0][0] / e.p() + m.v[0][0] / e.q() + m.w[0][0] / e.r());
  r.young_margin = r.young_bound - (2.0 / 3.0) * r.paraproduct_mass;

  const BellmanPoint root = node_point(e, m, 0, 0);
  const double b0 = model.eval_B(root);
  double mag = std::abs(model.linear_part(root)) + std::abs(model.eval_A(root.triple()));
  std::vector<double> leaf_b(tree.size(n)), leaf_mag(tree.size(n));
  for (std::size_t i = 0; i < leaf_b.size(); ++i) {
    const BellmanPoint pt = node_point(e, m, n, i);
    const double lin = model.linear_part(pt), a = model.eval_A(pt.triple());
    leaf_b[i] = lin - a;
    leaf_mag[i] = std::abs(lin) + std::abs(a);
  }
  r.telescoped = b0 - expectation(tree, n, leaf_b);
  mag += expectation(tree, n, leaf_mag);
  r.telescoping_margin = r.telescoped - (2.0 / 3.0) * r.paraproduct_mass;

  const std::vector<double> para = paraproduct_discrete(tree, m.x, m.y, n);
  std::vector<double> pz(para.size());
  for (std::size_t i = 0; i < para.size(); ++i) pz[i] = para[i] * m.z[n][i];
  r.dual_value = std::abs(expectation(tree, n, pz));
  r.norm_product = lp_norm(tree, m.x[n], e.p()) * lp_norm(tree, m.y[n], e.q()) * lp_norm(tree, m.z[n], e.r());
  r.constant = tree.uniform_dyadic() ? cc : 1.5 * cc;
  r.homogeneous_margin = r.constant * r.norm_product - r.dual_value;
  r.scale = 1.0 + r.young_bound + r.paraproduct_mass + mag + r.constant * r.norm_product + r.dual_value;
  return r;
}

bool SignedDualizedEstimate::ok(double tol) const {
  const bool parts_ok = std::all_of(parts.begin(), parts.end(), [&](const auto& p) { return p.ok(tol); });
  return parts_ok && dual_value <= parts_bound * (1.0 + tol) + tol;
}

SignedDualizedEstimate verify_estimate_dualized_signed(const Coefficients& c, const Exponents& e,
                                                       const Filtration& tree, const std::vector<double>& x_leaf,
                                                       const std::vector<double>& y_leaf,
                                                       const std::vector<double>& z_leaf) {
  auto part = [](const std::vector<double>& v, int sign) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(0.0, sign * v[i]);
    return out;
  };
  SignedDualizedEstimate r;
  const Process x = conditional_expectations(tree, x_leaf), y = conditional_expectations(tree, y_leaf),
                z = conditional_expectations(tree, z_leaf);
  const unsigned n = tree.depth();
  const std::vector<double> para = paraproduct_discrete(tree, x, y, n);
  std::vector<double> pz(para.size());
  for (std::size_t i = 0; i < para.size(); ++i) pz[i] = para[i] * z[n][i];
  r.dual_value = std::abs(expectation(tree, n, pz));
  for (int sx : {1, -1}) {
    for (int sy : {1, -1}) {
      for (int sz : {1, -1}) {
        const MartingaleTriple m =
            martingale_from_terminal(tree, e, part(x_leaf, sx), part(y_leaf, sy), part(z_leaf, sz));
        r.parts.push_back(verify_estimate_dualized(c, e, m));
        r.parts_bound += r.parts.back().constant * r.parts.back().norm_product;
      }
    }
  }
  return r;
}

ParaproductNorm paraproduct_norm_check(const Coefficients& c, const Exponents& e, const Filtration& tree,
                                       const std::vector<double>& x_leaf, const std::vector<double>& y_leaf) {
  const unsigned n = tree.depth();
  const Process x = conditional_expectations(tree, x_leaf), y = conditional_expectations(tree, y_leaf);
  const std::vector<double> para = paraproduct_discrete(tree, x, y, n);
  const double rp = e.r_conjugate();
  ParaproductNorm r;
  r.norm = lp_norm(tree, para, rp);
  std::vector<double> z(para.size()), pz(para.size());
  for (std::size_t i = 0; i < para.size(); ++i) {
    z[i] = std::copysign(std::pow(std::abs(para[i]), rp - 1.0), para[i]);
    pz[i] = para[i] * z[i];
  }
  const double zn = lp_norm(tree, z, e.r());
  r.dual_attained = zn > 0.0 ? expectation(tree, n, pz) / zn : 0.0;
  const double cc = c_constant(c, e);
  const double k = tree.uniform_dyadic() ? cc : 1.5 * cc;
  r.bound = 2.0 * k * lp_norm(tree, x_leaf, e.p()) * lp_norm(tree, y_leaf, e.q());
  return r;
}

MartingaleGenerator MartingaleGenerator::constant(double c) {
  return {"constant", [c](double, double) { return c; }};
}
MartingaleGenerator MartingaleGenerator::brownian() {
  return {"brownian", [](double, double b) { return b; }};
}
MartingaleGenerator MartingaleGenerator::affine(double a, double b) {
  return {"affine", [a, b](double, double x) { return a + b * x; }};
}
MartingaleGenerator MartingaleGenerator::exponential(double sigma) {
  return {"exponential", [sigma](double s, double b) { return std::exp(sigma * b - 0.5 * sigma * sigma * s); }};
}
MartingaleGenerator MartingaleGenerator::custom(std::string name, std::function<double(double, double)> fn) {
  return {std::move(name), std::move(fn)};
}

namespace {

// Raw power sums of one statistic, merged in shard order.
struct Moments {
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0, sabs = 0;
  void add(double v, double norm_exponent) {
    const double v2 = v * v;
    s1 += v;
    s2 += v2;
    s3 += v2 * v;
    s4 += v2 * v2;
    sabs += std::pow(std::abs(v), norm_exponent);
  }
};

struct Summary {
  double mean, mean_stderr, variance, variance_stderr, norm;
};

Summary summarize(const std::vector<Moments>& shards, double n, double norm_exponent) {
  auto total = [&](double Moments::*f) {
    std::vector<double> v(shards.size());
    for (std::size_t i = 0; i < shards.size(); ++i) v[i] = shards[i].*f;
    return pairwise_sum(v);
  };
  const double m1 = total(&Moments::s1) / n, m2 = total(&Moments::s2) / n, m3 = total(&Moments::s3) / n,
               m4 = total(&Moments::s4) / n;
  const double var = std::max(0.0, m2 - m1 * m1);
  const double c4 = m4 - 4 * m3 * m1 + 6 * m2 * m1 * m1 - 3 * m1 * m1 * m1 * m1;
  Summary s;
  s.mean = m1;
  s.mean_stderr = std::sqrt(var / n);
  s.variance = var * n / (n - 1.0);
  s.variance_stderr = std::sqrt(std::max(0.0, c4 - var * var) / n);
  s.norm = std::pow(total(&Moments::sabs) / n, 1.0 / norm_exponent);
  return s;
}

}  // namespace

RiemannReport brownian_riemann_approx(const MartingaleGenerator& x, const MartingaleGenerator& y,
                                      const BrownianGrid& grid, std::size_t refinements, double norm_exponent,
                                      const std::function<double(double)>& reference, unsigned threads) {
  if (refinements < 1 || refinements > 30) throw ConstraintViolation("refinements must be in [1, 30]");
  if (grid.steps == 0 || grid.steps % (std::size_t{1} << (refinements - 1)) != 0) {
    throw ConstraintViolation("finest step count must be divisible by 2^(refinements - 1)");
  }
  if (grid.paths < 2) throw ConstraintViolation("need at least two paths");
  if (!(grid.horizon > 0.0)) throw ConstraintViolation("time horizon must be positive");

  const std::size_t m = grid.steps;
  const double dt = grid.horizon / static_cast<double>(m);
  const std::size_t shards = shard_count(grid.paths);
  struct Partial {
    std::vector<Moments> sums, diffs;
    Moments x_inc, y_inc;
  };
  std::vector<Partial> parts(shards);
  for_each_shard(shards, threads, [&](std::size_t k) {
    Rng rng = shard_rng(grid.seed, k);
    std::normal_distribution<double> n01;
    Partial& out = parts[k];
    out.sums.resize(refinements);
    out.diffs.resize(refinements);
    std::vector<double> xs(m + 1), ys(m + 1);
    const std::size_t end = std::min(grid.paths, (k + 1) * kShardSize);
    for (std::size_t path = k * kShardSize; path < end; ++path) {
      double b = 0.0;
      xs[0] = x.fn(0.0, 0.0);
      ys[0] = y.fn(0.0, 0.0);
      for (std::size_t i = 1; i <= m; ++i) {
        b += std::sqrt(dt) * n01(rng);
        const double s = dt * static_cast<double>(i);
        xs[i] = x.fn(s, b);
        ys[i] = y.fn(s, b);
      }
      out.x_inc.add(xs[m] - xs[0], norm_exponent);
      out.y_inc.add(ys[m] - ys[0], norm_exponent);
      const double ref = reference ? reference(b) : 0.0;
      for (std::size_t j = 0; j < refinements; ++j) {
        const std::size_t stride = std::size_t{1} << j;
        double sum = 0.0;
        for (std::size_t i = stride; i <= m; i += stride) sum += xs[i - stride] * (ys[i] - ys[i - stride]);
        out.sums[j].add(sum, norm_exponent);
        out.diffs[j].add(sum - ref, norm_exponent);
      }
    }
  });

  const double n = static_cast<double>(grid.paths);
  auto gather = [&](auto pick) {
    std::vector<Moments> v;
    for (const auto& p : parts) v.push_back(pick(p));
    return v;
  };
  const Summary xi = summarize(gather([](const Partial& p) { return p.x_inc; }), n, norm_exponent);
  const Summary yi = summarize(gather([](const Partial& p) { return p.y_inc; }), n, norm_exponent);
  auto not_martingale = [](const Summary& s) { return std::abs(s.mean) > 6.0 * s.mean_stderr + 1e-12; };
  if (not_martingale(xi)) throw SimulationError("generator " + x.name + " has nonzero mean increment");
  if (not_martingale(yi)) throw SimulationError("generator " + y.name + " has nonzero mean increment");

  RiemannReport r;
  r.x_name = x.name;
  r.y_name = y.name;
  r.grid = grid;
  r.norm_exponent = norm_exponent;
  r.increment_mean = yi.mean;
  r.increment_stderr = yi.mean_stderr;
  r.direct_norm = yi.norm;
  for (std::size_t j = refinements; j-- > 0;) {
    const std::size_t jj = j;
    const Summary s = summarize(gather([&](const Partial& p) { return p.sums[jj]; }), n, norm_exponent);
    RiemannLevel level;
    level.steps = m >> j;
    level.mean = s.mean;
    level.mean_stderr = s.mean_stderr;
    level.variance = s.variance;
    level.variance_stderr = s.variance_stderr;
    level.norm = s.norm;
    if (!r.levels.empty()) {
      const double prev = r.levels.back().norm;
      level.norm_change = prev > 0.0 ? std::abs(s.norm - prev) / prev : 0.0;
    }
    if (reference) {
      const Summary d = summarize(gather([&](const Partial& p) { return p.diffs[jj]; }), n, norm_exponent);
      level.ref_mean = d.mean;
      level.ref_mean_stderr = d.mean_stderr;
      level.ref_variance = d.variance;
      level.ref_variance_stderr = d.variance_stderr;
    }
    r.levels.push_back(level);
  }
  return r;
}

std::vector<double> random_leaves(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  if (uniform01(rng) < 0.05) {
    std::fill(v.begin(), v.end(), log_uniform(rng, 1e-3, 1e3));
    return v;
  }
  for (double& x : v) x = uniform01(rng) < 0.05 ? 0.0 : log_uniform(rng, 1e-3, 1e3);
  return v;
}

std::vector<PropertyResult> run_martingale_suite(const Coefficients& c, const Exponents& e,
                                                 const MartingaleSuiteConfig& cfg) {
  std::vector<PropertyResult> out;
  std::uint64_t index = 0;
  auto run = [&](std::string name, double tol, auto&& draw) {
    out.push_back(scan_property(std::move(name), cfg.samples, cfg.seed + index++, cfg.threads, cfg.max_witnesses, tol, draw));
  };
  // Half of the draws use the uniform dyadic tree, half a random general tree.
  auto tree_for = [&](Rng& rng) {
    return uniform01(rng) < 0.5 ? Filtration::dyadic(cfg.depth)
                                : Filtration::random(rng, cfg.general_depth, cfg.max_branching);
  };
  auto leaves3 = [&](Rng& rng, const Filtration& tree) {
    const std::size_t n = tree.size(tree.depth());
    std::vector<double> x = random_leaves(rng, n), y = random_leaves(rng, n), z = random_leaves(rng, n);
    return std::array<std::vector<double>, 3>{std::move(x), std::move(y), std::move(z)};
  };
  auto flat = [](const std::array<std::vector<double>, 3>& l) {
    std::vector<double> v;
    for (const auto& a : l) v.insert(v.end(), a.begin(), a.end());
    return v;
  };

  run("martingale property", cfg.identity_tol, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const Filtration tree = tree_for(rng);
    const auto l = leaves3(rng, tree);
    const MartingaleTriple m = martingale_from_terminal(tree, e, l[0], l[1], l[2]);
    double worst = 0.0, scale = 1.0;
    for (const Process* p : {&m.x, &m.y, &m.z, &m.u, &m.v, &m.w}) {
      worst = std::max(worst, martingale_defect(tree, *p));
      scale = std::max(scale, 1.0 + *std::max_element(p->back().begin(), p->back().end()));
    }
    return PropertyInstance{{-worst, scale}, flat(l)};
  });
  run("dual identity", cfg.identity_tol, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const Filtration tree = tree_for(rng);
    const auto l = leaves3(rng, tree);
    const MartingaleTriple m = martingale_from_terminal(tree, e, l[0], l[1], l[2]);
    const DualDefect d = dual_identity_check(tree, m.x, m.y, m.z, tree.depth());
    return PropertyInstance{{-d.defect, d.scale}, flat(l)};
  });
  run("supermartingale steps", cfg.tol, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const Filtration tree = tree_for(rng);
    const auto l = leaves3(rng, tree);
    const MartingaleTriple m = martingale_from_terminal(tree, e, l[0], l[1], l[2]);
    ScaledMargin worst{std::numeric_limits<double>::infinity(), 1.0};
    for (unsigned k = 1; k <= tree.depth(); ++k) {
      for (const ScaledMargin& s : supermartingale_step_check(c, e, m, k)) {
        if (s.relative() < worst.relative()) worst = s;
      }
    }
    return PropertyInstance{worst, flat(l)};
  });
  run("dualized estimate", cfg.tol, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const Filtration tree = tree_for(rng);
    const auto l = leaves3(rng, tree);
    const DualizedEstimate d = verify_estimate_dualized(c, e, martingale_from_terminal(tree, e, l[0], l[1], l[2]));
    const double worst = std::min({d.young_margin, d.telescoping_margin, d.homogeneous_margin});
    return PropertyInstance{{worst, d.scale}, flat(l)};
  });
  run("signed dualized estimate", cfg.tol, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const Filtration tree = tree_for(rng);
    auto l = leaves3(rng, tree);
    for (auto& leaves : l) {
      for (double& v : leaves) v *= uniform01(rng) < 0.5 ? -1.0 : 1.0;
    }
    const SignedDualizedEstimate d = verify_estimate_dualized_signed(c, e, tree, l[0], l[1], l[2]);
    double worst = d.parts_bound - d.dual_value, scale = 1.0 + d.parts_bound + d.dual_value;
    for (const auto& p : d.parts) {
      const double m = std::min({p.young_margin, p.telescoping_margin, p.homogeneous_margin});
      if (m / p.scale < worst / scale) {
        worst = m;
        scale = p.scale;
      }
    }
    return PropertyInstance{{worst, scale}, flat(l)};
  });
  run("paraproduct norm", 0.0, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const Filtration tree = tree_for(rng);
    const auto l = leaves3(rng, tree);
    const ParaproductNorm pn = paraproduct_norm_check(c, e, tree, l[0], l[1]);
    return PropertyInstance{{pn.bound - pn.norm, 1.0 + pn.bound + pn.norm}, flat(l)};
  });
  return out;
}

}  // namespace bellman
