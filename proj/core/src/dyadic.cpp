#include "bellman/dyadic.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <limits>
#include <string>

#include "bellman/errors.hpp"

namespace bellman {
namespace {

unsigned depth_of(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw ConstraintViolation("step function needs 2^depth cells, got " + std::to_string(n));
  }
  unsigned d = 0;
  while ((std::size_t{1} << d) < n) ++d;
  return d;
}

std::size_t heap_index(const TreeNode& node) { return (std::size_t{1} << node.level) - 1 + node.index; }

// Averages of all nodes of levels 0..depth, heap order, by repeated halving.
std::vector<double> averages(const std::vector<double>& cells, unsigned depth) {
  std::vector<double> out((std::size_t{2} << depth) - 1);
  const std::size_t base = (std::size_t{1} << depth) - 1;
  std::copy(cells.begin(), cells.end(), out.begin() + static_cast<std::ptrdiff_t>(base));
  for (unsigned l = depth; l-- > 0;) {
    const std::size_t b = (std::size_t{1} << l) - 1, c = (std::size_t{2} << l) - 1;
    for (std::size_t i = 0; i < (std::size_t{1} << l); ++i) {
      out[b + i] = 0.5 * (out[c + 2 * i] + out[c + 2 * i + 1]);
    }
  }
  return out;
}

double half_diff(const std::vector<double>& avg, std::size_t heap) {
  return 0.5 * (avg[2 * heap + 1] - avg[2 * heap + 2]);
}

unsigned common_depth(const DyadicStep& f, const DyadicStep& g, const DyadicStep& h) {
  return std::max({f.depth(), g.depth(), h.depth()});
}

struct TripleAverages {
  unsigned depth;
  std::vector<double> f, g, h;
};

TripleAverages triple_averages(const DyadicStep& f, const DyadicStep& g, const DyadicStep& h) {
  const unsigned n = common_depth(f, g, h);
  return {n, averages(f.refined(n).values(), n), averages(g.refined(n).values(), n),
          averages(h.refined(n).values(), n)};
}

// Phi over the subtree of `node` from precomputed averages.
double phi_from(const TripleAverages& t, const TreeNode& node) {
  double total = 0.0;
  double weight = 1.0;
  for (unsigned l = node.level; l < t.depth; ++l) {
    const std::size_t width = std::size_t{1} << (l - node.level);
    const std::size_t first = (std::size_t{1} << l) - 1 + node.index * width;
    double level_sum = 0.0;
    for (std::size_t i = first; i < first + width; ++i) {
      level_sum += t.f[i] * std::abs(half_diff(t.g, i)) * std::abs(half_diff(t.h, i));
    }
    total += weight * level_sum;
    weight *= 0.5;
  }
  return total;
}

}  // namespace

double TreeNode::length() const { return std::ldexp(1.0, -static_cast<int>(level)); }

bool TreeNode::contains(const TreeNode& other) const {
  return other.level >= level && (other.index >> (other.level - level)) == index;
}

void validate(const TreeNode& node) {
  if (node.level >= 63 || node.index >= (std::uint64_t{1} << node.level)) {
    throw IndexError("no dyadic node (" + std::to_string(node.level) + ", " + std::to_string(node.index) + ")");
  }
}

DyadicStep::DyadicStep(std::vector<double> values) : depth_(depth_of(values.size())), values_(std::move(values)) {
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("step function values must be finite and >= 0");
  }
}

DyadicStep DyadicStep::constant(unsigned depth, double value) {
  return DyadicStep(std::vector<double>(std::size_t{1} << depth, value));
}

DyadicStep DyadicStep::refined(unsigned depth) const {
  if (depth < depth_) throw ConstraintViolation("cannot refine to a coarser depth");
  const std::size_t rep = std::size_t{1} << (depth - depth_);
  std::vector<double> out;
  out.reserve(values_.size() * rep);
  for (double v : values_) out.insert(out.end(), rep, v);
  return DyadicStep(std::move(out));
}

DyadicStep DyadicStep::pow(double exponent) const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [&](double v) { return std::pow(v, exponent); });
  return DyadicStep(std::move(out));
}

SignedStep::SignedStep(std::vector<double> values) : depth_(depth_of(values.size())), values_(std::move(values)) {}

double integrate_product(const SignedStep& a, const DyadicStep& b) {
  if (a.size() != b.size()) throw ConstraintViolation("integrate_product needs equal depths");
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  return pairwise_sum(prod) / static_cast<double>(a.size());
}

SignPattern::SignPattern(std::vector<double> eps) : levels_(depth_of(eps.size() + 1)), eps_(std::move(eps)) {
  for (double x : eps_) {
    if (!(std::abs(x) <= 1.0)) throw DomainError("sign pattern entries must satisfy |eps| <= 1");
  }
}

SignPattern SignPattern::constant(unsigned levels, double value) {
  return SignPattern(std::vector<double>((std::size_t{1} << levels) - 1, value));
}

SignPattern SignPattern::random(Rng& rng, unsigned levels) {
  std::vector<double> eps((std::size_t{1} << levels) - 1);
  for (double& x : eps) x = uniform(rng, -1.0, 1.0);
  return SignPattern(std::move(eps));
}

double SignPattern::at(const TreeNode& node) const {
  validate(node);
  if (node.level >= levels_) throw IndexError("sign pattern does not cover level " + std::to_string(node.level));
  return eps_[heap_index(node)];
}

double average(const DyadicStep& f, const TreeNode& node) {
  validate(node);
  if (node.level >= f.depth()) return f[node.index >> (node.level - f.depth())];
  const std::size_t width = std::size_t{1} << (f.depth() - node.level);
  return pairwise_sum(f.values().data() + node.index * width, width) / static_cast<double>(width);
}

double haar_diff(const DyadicStep& f, const TreeNode& node) {
  validate(node);
  if (node.level >= f.depth()) return 0.0;
  return 0.5 * (average(f, node.left()) - average(f, node.right()));
}

std::vector<double> node_averages(const DyadicStep& f) { return averages(f.values(), f.depth()); }

double phi_form(const DyadicStep& f, const DyadicStep& g, const DyadicStep& h, const TreeNode& node) {
  validate(node);
  const TripleAverages t = triple_averages(f, g, h);
  if (node.level >= t.depth) return 0.0;
  return phi_from(t, node);
}

double lambda_form(const SignPattern& eps, const DyadicStep& f, const DyadicStep& g, const DyadicStep& h) {
  const TripleAverages t = triple_averages(f, g, h);
  if (eps.levels() < t.depth) throw ConstraintViolation("sign pattern does not cover the common depth");
  std::vector<double> terms;
  terms.reserve((std::size_t{1} << t.depth) - 1);
  for (unsigned l = 0; l < t.depth; ++l) {
    const double len = std::ldexp(1.0, -static_cast<int>(l));
    for (std::size_t i = (std::size_t{1} << l) - 1; i < (std::size_t{2} << l) - 1; ++i) {
      terms.push_back(eps.values()[i] * len * t.f[i] * half_diff(t.g, i) * half_diff(t.h, i));
    }
  }
  return pairwise_sum(terms);
}

SignedStep pi_apply(const SignPattern& eps, const DyadicStep& f, const DyadicStep& g) {
  const unsigned n = std::max(f.depth(), g.depth());
  if (eps.levels() < n) throw ConstraintViolation("sign pattern does not cover the common depth");
  const std::vector<double> af = averages(f.refined(n).values(), n);
  const std::vector<double> ag = averages(g.refined(n).values(), n);
  std::vector<double> out(std::size_t{1} << n, 0.0);
  for (std::size_t cell = 0; cell < out.size(); ++cell) {
    double s = 0.0;
    for (unsigned l = 0; l < n; ++l) {
      const std::size_t idx = cell >> (n - l);
      const std::size_t heap = (std::size_t{1} << l) - 1 + idx;
      const bool left = ((cell >> (n - l - 1)) & 1u) == 0;
      s += eps.values()[heap] * af[heap] * half_diff(ag, heap) * (left ? 1.0 : -1.0);
    }
    out[cell] = s;
  }
  return SignedStep(std::move(out));
}

DyadicStep maximal_fn(const DyadicStep& f) {
  const unsigned n = f.depth();
  const std::vector<double> af = node_averages(f);
  std::vector<double> out(f.size());
  for (std::size_t cell = 0; cell < out.size(); ++cell) {
    double m = 0.0;
    for (unsigned l = 0; l <= n; ++l) m = std::max(m, std::abs(af[(std::size_t{1} << l) - 1 + (cell >> (n - l))]));
    out[cell] = m;
  }
  return DyadicStep(std::move(out));
}

DyadicStep square_fn(const DyadicStep& f) {
  const unsigned n = f.depth();
  const std::vector<double> af = node_averages(f);
  std::vector<double> out(f.size());
  for (std::size_t cell = 0; cell < out.size(); ++cell) {
    double s = 0.0;
    for (unsigned l = 0; l < n; ++l) {
      const double d = half_diff(af, (std::size_t{1} << l) - 1 + (cell >> (n - l)));
      s += d * d;
    }
    out[cell] = std::sqrt(s);
  }
  return DyadicStep(std::move(out));
}

NormalizedEstimate verify_normalized_estimate(const Coefficients& c, const Exponents& e, const DyadicStep& f,
                                              const DyadicStep& g, const DyadicStep& h, const TreeNode& node) {
  NormalizedEstimate r;
  r.phi = phi_form(f, g, h, node);
  const double fp = average(f.pow(e.p()), node);
  const double gq = average(g.pow(e.q()), node);
  const double hr = average(h.pow(e.r()), node);
  const double cc = c_constant(c, e);
  r.bound = cc * (fp / e.p() + gq / e.q() + hr / e.r());
  r.margin = r.bound - r.phi;
  r.norm_product = std::pow(fp, 1.0 / e.p()) * std::pow(gq, 1.0 / e.q()) * std::pow(hr, 1.0 / e.r());
  r.homogeneous_ratio = r.norm_product > 0.0 ? r.phi / r.norm_product : 0.0;
  return r;
}

BellmanPoint moment_point(const Exponents& e, const DyadicStep& f, const DyadicStep& g, const DyadicStep& h,
                          const TreeNode& node) {
  const double u = average(f, node), v = average(g, node), w = average(h, node);
  const double big_u = std::max(average(f.pow(e.p()), node), std::pow(u, e.p()));
  const double big_v = std::max(average(g.pow(e.q()), node), std::pow(v, e.q()));
  const double big_w = std::max(average(h.pow(e.r()), node), std::pow(w, e.r()));
  return BellmanPoint(e, u, v, w, big_u, big_v, big_w);
}

std::vector<ScaledMargin> bellman_induction_check(const Coefficients& c, const Exponents& e, const DyadicStep& f,
                                                  const DyadicStep& g, const DyadicStep& h, const TreeNode& node,
                                                  unsigned levels) {
  validate(node);
  const unsigned n = common_depth(f, g, h);
  if (node.level + levels > n) throw ConstraintViolation("induction deeper than the step functions");
  const BellmanModel model(c, e);
  const DyadicStep fr = f.refined(n), gr = g.refined(n), hr = h.refined(n);
  const std::vector<double> af = averages(fr.values(), n), ag = averages(gr.values(), n),
                            ah = averages(hr.values(), n);
  const std::vector<double> afp = averages(fr.pow(e.p()).values(), n), agq = averages(gr.pow(e.q()).values(), n),
                            ahr = averages(hr.pow(e.r()).values(), n);
  auto bellman_at = [&](std::size_t i, double& magnitude) {
    const double u = af[i], v = ag[i], w = ah[i];
    const BellmanPoint x(e, u, v, w, std::max(afp[i], std::pow(u, e.p())), std::max(agq[i], std::pow(v, e.q())),
                         std::max(ahr[i], std::pow(w, e.r())));
    const double lin = model.linear_part(x), a = model.eval_A(x.triple());
    magnitude = std::abs(lin) + std::abs(a);
    return lin - a;
  };

  double top_mag = 0.0;
  const double top = bellman_at(heap_index(node), top_mag);
  std::vector<ScaledMargin> out{{0.0, 1.0 + top_mag}};
  double paraproduct = 0.0;
  for (unsigned k = 1; k <= levels; ++k) {
    // Paraproduct term of level k-1 below the node.
    const unsigned lp = node.level + k - 1;
    const std::size_t wp = std::size_t{1} << (k - 1);
    const std::size_t fp = (std::size_t{1} << lp) - 1 + node.index * wp;
    double level_para = 0.0;
    for (std::size_t i = fp; i < fp + wp; ++i) {
      level_para += af[i] * std::abs(half_diff(ag, i)) * std::abs(half_diff(ah, i));
    }
    paraproduct += std::ldexp(level_para, -static_cast<int>(k - 1));

    const unsigned l = node.level + k;
    const std::size_t width = std::size_t{1} << k;
    const std::size_t first = (std::size_t{1} << l) - 1 + node.index * width;
    double children = 0.0, mag = 0.0;
    for (std::size_t i = first; i < first + width; ++i) {
      double m = 0.0;
      children += bellman_at(i, m);
      mag += m;
    }
    children = std::ldexp(children, -static_cast<int>(k));
    mag = std::ldexp(mag, -static_cast<int>(k));
    out.push_back({top - children - paraproduct, 1.0 + top_mag + mag + paraproduct});
  }
  return out;
}

DyadicStep match_moments(const std::vector<double>& shape, double mean, double moment, double power) {
  const std::size_t n = shape.size();
  depth_of(n);
  if (!(mean >= 0.0) || !(moment >= 0.0)) throw DomainError("moments must be nonnegative");
  const double floor = std::pow(mean, power);
  const double ceiling = std::pow(static_cast<double>(n), power - 1.0) * floor;
  if (moment > ceiling * (1.0 + 1e-12) || moment < floor * (1.0 - 1e-12) || (mean == 0.0 && moment > 0.0)) {
    throw InfeasibleMoments("no nonnegative step function on " + std::to_string(n) + " cells has these moments");
  }
  if (moment <= floor) return DyadicStep(std::vector<double>(n, mean));

  auto build = [&](const std::vector<double>& d, double alpha) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(0.0, mean + alpha * d[i]);
    return out;
  };
  auto moment_of = [&](const std::vector<double>& vals) {
    std::vector<double> pw(n);
    for (std::size_t i = 0; i < n; ++i) pw[i] = std::pow(vals[i], power);
    return pairwise_sum(pw) / static_cast<double>(n);
  };
  auto spread = [&](const std::vector<double>& y) {
    const double ybar = pairwise_sum(y) / static_cast<double>(n);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = y[i] - ybar;
    return d;
  };

  std::vector<double> d = spread(shape);
  double lowest = *std::min_element(d.begin(), d.end());
  double alpha_max = lowest < 0.0 ? mean / -lowest : 0.0;
  if (alpha_max == 0.0 || moment_of(build(d, alpha_max)) < moment) {
    std::vector<double> spike(n, 0.0);
    spike[0] = 1.0;
    d = spread(spike);
    alpha_max = mean * static_cast<double>(n);
  }
  double lo = 0.0, hi = alpha_max;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (moment_of(build(d, mid)) <= moment ? lo : hi) = mid;
  }
  return DyadicStep(build(d, lo));
}

AbstractLowerResult abstract_bellman_lower(const Coefficients& c, const Exponents& e, const BellmanPoint& x,
                                           const AbstractLowerConfig& config) {
  (void)c;  // the search only uses moments; c enters through the caller's comparison
  if (config.depth < 1) throw ConstraintViolation("abstract lower bound needs depth >= 1");
  Rng rng = shard_rng(config.seed, 0);
  std::normal_distribution<double> n01;
  const std::array<double, 3> means{x.u(), x.v(), x.w()};
  const std::array<double, 3> moments{x.big_u(), x.big_v(), x.big_w()};
  const std::array<double, 3> powers{e.p(), e.q(), e.r()};

  AbstractLowerResult res;
  std::array<std::vector<double>, 3> shapes;
  std::optional<std::array<DyadicStep, 3>> best;
  double best_value = 0.0;

  auto solve = [&](const std::array<std::vector<double>, 3>& s) -> std::optional<std::array<DyadicStep, 3>> {
    try {
      return std::array<DyadicStep, 3>{match_moments(s[0], means[0], moments[0], powers[0]),
                                       match_moments(s[1], means[1], moments[1], powers[1]),
                                       match_moments(s[2], means[2], moments[2], powers[2])};
    } catch (const InfeasibleMoments&) {
      return std::nullopt;
    }
  };

  for (unsigned depth = 1; depth <= config.depth; ++depth) {
    const std::size_t cells = std::size_t{1} << depth;
    if (best) {
      for (auto& s : shapes) {
        std::vector<double> fine;
        fine.reserve(cells);
        for (double v : s) fine.insert(fine.end(), 2, v);
        s = std::move(fine);
      }
      for (auto& fn : *best) fn = fn.refined(depth);
    } else {
      for (auto& s : shapes) {
        s.resize(cells);
        for (double& v : s) v = n01(rng);
      }
      best = solve(shapes);
      if (best) best_value = phi_form((*best)[0], (*best)[1], (*best)[2], {0, 0});
    }
    if (best) {
      for (std::size_t it = 0; it < config.iters; ++it) {
        auto trial = shapes;
        const std::size_t j = static_cast<std::size_t>(uniform01(rng) * 3.0) % 3;
        auto& s = trial[j];
        const double kind = uniform01(rng);
        if (kind < 0.1) {
          for (double& v : s) v = n01(rng);
        } else if (kind < 0.55) {
          s[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cells)) % cells] += n01(rng);
        } else {
          const double sigma = 0.3 * (1.0 + *std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()));
          for (double& v : s) v += sigma * n01(rng) / std::sqrt(static_cast<double>(cells));
        }
        auto fns = solve(trial);
        if (!fns) continue;
        const double value = phi_form((*fns)[0], (*fns)[1], (*fns)[2], {0, 0});
        if (value > best_value) {
          best_value = value;
          best = std::move(fns);
          shapes = std::move(trial);
        }
      }
    }
    res.per_depth.push_back(best_value);
  }
  if (!best) {
    throw InfeasibleMoments("moments of the point cannot be matched at depth " + std::to_string(config.depth));
  }
  res.value = best_value;
  res.f = (*best)[0];
  res.g = (*best)[1];
  res.h = (*best)[2];
  return res;
}

DyadicStep random_dyadic_step(Rng& rng, unsigned depth) {
  std::vector<double> v(std::size_t{1} << depth);
  if (uniform01(rng) < 0.1) {
    std::fill(v.begin(), v.end(), log_uniform(rng, 1e-3, 1e3));
    return DyadicStep(std::move(v));
  }
  for (double& x : v) x = uniform01(rng) < 0.05 ? 0.0 : log_uniform(rng, 1e-3, 1e3);
  return DyadicStep(std::move(v));
}

DyadicTriple random_dyadic_triple(Rng& rng, unsigned max_depth) {
  const unsigned depth = 1 + static_cast<unsigned>(uniform01(rng) * max_depth) % std::max(1u, max_depth);
  DyadicStep f = random_dyadic_step(rng, depth);
  DyadicStep g = random_dyadic_step(rng, depth);
  DyadicStep h = random_dyadic_step(rng, depth);
  return {std::move(f), std::move(g), std::move(h)};
}

namespace {

std::vector<double> triple_point(const DyadicTriple& t) {
  std::vector<double> v;
  for (const auto* fn : {&t.f, &t.g, &t.h}) v.insert(v.end(), fn->values().begin(), fn->values().end());
  return v;
}

ScaledMargin worst_of(const std::vector<ScaledMargin>& ms) {
  ScaledMargin worst{std::numeric_limits<double>::infinity(), 1.0};
  for (const auto& m : ms) {
    if (m.relative() < worst.relative()) worst = m;
  }
  return worst;
}

}  // namespace

std::vector<PropertyResult> run_dyadic_suite(const Coefficients& c, const Exponents& e,
                                             const DyadicSuiteConfig& cfg) {
  const BellmanModel model(c, e);
  std::vector<PropertyResult> out;
  std::uint64_t index = 0;
  auto run = [&](std::string name, std::size_t samples, double tol, auto&& draw) {
    out.push_back(scan_property(std::move(name), samples, cfg.seed + index++, cfg.threads, cfg.max_witnesses, tol, draw));
  };

  run("scaling identity", cfg.samples, cfg.identity_tol, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const DyadicTriple t = random_dyadic_triple(rng, cfg.max_depth);
    const TripleAverages avg = triple_averages(t.f, t.g, t.h);
    std::vector<ScaledMargin> ms;
    for (unsigned l = 0; l < avg.depth; ++l) {
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << l); ++i) {
        const TreeNode node{l, i};
        const std::size_t hi = heap_index(node);
        const double whole = phi_from(avg, node);
        const double lhalf = 0.5 * phi_from(avg, node.left()), rhalf = 0.5 * phi_from(avg, node.right());
        const double term = avg.f[hi] * std::abs(half_diff(avg.g, hi)) * std::abs(half_diff(avg.h, hi));
        ms.push_back({-std::abs(whole - (lhalf + rhalf + term)), 1.0 + whole + lhalf + rhalf + term});
      }
    }
    return PropertyInstance{worst_of(ms), triple_point(t)};
  });
  run("duality", cfg.samples, cfg.identity_tol, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const DyadicTriple t = random_dyadic_triple(rng, cfg.max_depth);
    const SignPattern eps = SignPattern::random(rng, t.f.depth());
    const double lam = lambda_form(eps, t.f, t.g, t.h);
    const SignedStep pi = pi_apply(eps, t.f, t.g);
    const double dual = integrate_product(pi, t.h);
    std::vector<double> mag(pi.values());
    for (double& m : mag) m = std::abs(m);
    const double scale = 1.0 + integrate_product(SignedStep(std::move(mag)), t.h);
    return PropertyInstance{{-std::abs(lam - dual), scale}, triple_point(t)};
  });
  run("square function identity", cfg.samples, cfg.identity_tol, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const DyadicTriple t = random_dyadic_triple(rng, cfg.max_depth);
    const double lam = lambda_form(SignPattern::constant(t.f.depth(), 1.0), t.f, t.g, t.g);
    const DyadicStep sg = square_fn(t.g);
    std::vector<double> cells(t.f.size());
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = t.f[i] * sg[i] * sg[i];
    const double direct = pairwise_sum(cells) / static_cast<double>(cells.size());
    return PropertyInstance{{-std::abs(lam - direct), 1.0 + std::abs(lam) + std::abs(direct)}, triple_point(t)};
  });
  run("normalized estimate", cfg.samples, 0.0, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const DyadicTriple t = random_dyadic_triple(rng, cfg.max_depth);
    const NormalizedEstimate r = verify_normalized_estimate(c, e, t.f, t.g, t.h, {0, 0});
    return PropertyInstance{{r.margin, 1.0 + r.bound + r.phi}, triple_point(t)};
  });
  run("homogeneous estimate", cfg.samples, 0.0, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const DyadicTriple t = random_dyadic_triple(rng, cfg.max_depth);
    const SignPattern eps = SignPattern::random(rng, t.f.depth());
    const double lam = std::abs(lambda_form(eps, t.f, t.g, t.h));
    const NormalizedEstimate r = verify_normalized_estimate(c, e, t.f, t.g, t.h, {0, 0});
    const double bound = model.c_constant() * r.norm_product;
    return PropertyInstance{{bound - lam, 1.0 + bound + lam}, triple_point(t)};
  });
  run("Bellman induction", cfg.samples, cfg.tol, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const DyadicTriple t = random_dyadic_triple(rng, cfg.max_depth);
    return PropertyInstance{worst_of(bellman_induction_check(c, e, t.f, t.g, t.h, {0, 0}, t.f.depth())),
                            triple_point(t)};
  });
  run("abstract lower bound <= B", cfg.abstract_samples, cfg.tol, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const double u = log_uniform(rng, 1e-2, 1e2), v = log_uniform(rng, 1e-2, 1e2), w = log_uniform(rng, 1e-2, 1e2);
    auto lift = [&](double base, double power) {
      return std::pow(base, power) * (1.0 + log_uniform(rng, 1e-4, 1e1));
    };
    const double bu = lift(u, e.p()), bv = lift(v, e.q()), bw = lift(w, e.r());
    const BellmanPoint x(e, u, v, w, bu, bv, bw);
    AbstractLowerConfig acfg;
    acfg.depth = cfg.abstract_depth;
    acfg.iters = cfg.abstract_iters;
    acfg.seed = static_cast<std::uint64_t>(rng());
    try {
      const AbstractLowerResult lower = abstract_bellman_lower(c, e, x, acfg);
      const double b = model.eval_B(x);
      const double scale = 1.0 + model.linear_part(x) + std::abs(model.eval_A(x.triple())) + lower.value;
      return PropertyInstance{{b - lower.value, scale}, {x.array().begin(), x.array().end()}};
    } catch (const InfeasibleMoments&) {
      return std::nullopt;
    }
  });
  return out;
}

}  // namespace bellman
