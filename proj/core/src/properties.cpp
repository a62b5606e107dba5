#include "bellman/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "bellman/errors.hpp"
#include "bellman/mollifier.hpp"

namespace bellman {
namespace {

std::vector<double> concat(std::initializer_list<std::array<double, 3>> parts) {
  std::vector<double> v;
  for (const auto& p : parts) v.insert(v.end(), p.begin(), p.end());
  return v;
}

std::vector<double> concat6(std::initializer_list<std::array<double, 6>> parts) {
  std::vector<double> v;
  for (const auto& p : parts) v.insert(v.end(), p.begin(), p.end());
  return v;
}

double natural_scale(double g, double a, double x) { return std::abs(g) + std::abs(a) / x; }

}  // namespace

std::string_view to_string(Surface s) {
  switch (s) {
    case Surface::UV: return "u^p=v^q";
    case Surface::UW: return "u^p=w^r";
    case Surface::VW: return "v^q=w^r";
  }
  return "?";
}

A2Margins check_A2(const BellmanModel& model, const TriplePoint& x) {
  const auto& c = model.coefficients();
  const auto& e = model.exponents();
  const double a = model.eval_A(x);
  const double top = c.a() * std::pow(x.u(), e.p()) + c.b() * std::pow(x.v(), e.q()) + c.c() * std::pow(x.w(), e.r());
  const double scale = 1.0 + std::abs(a) + std::abs(top);
  return {{a, scale}, {top - a, scale}};
}

ScaledMargin check_A3_midpoint(const BellmanModel& model, const TriplePoint& x1, const TriplePoint& x2) {
  const TriplePoint x(0.5 * (x1.u() + x2.u()), 0.5 * (x1.v() + x2.v()), 0.5 * (x1.w() + x2.w()));
  const double a1 = model.eval_A(x1), a2 = model.eval_A(x2), a = model.eval_A(x);
  const double rhs = x.u() * 0.5 * std::abs(x1.v() - x2.v()) * 0.5 * std::abs(x1.w() - x2.w());
  return {0.5 * a1 + 0.5 * a2 - a - rhs, 1.0 + 0.5 * std::abs(a1) + 0.5 * std::abs(a2) + std::abs(a) + rhs};
}

ScaledMargin check_A3_infinitesimal(const BellmanModel& model, const TriplePoint& x, const Vector3& d,
                                    double margin) {
  const Matrix3 h = model.hess_A(x, margin);
  const double quad = d.dot(h * d);
  const double rhs = 2.0 * x.u() * std::abs(d[1]) * std::abs(d[2]);
  const double mag = (h.cwiseAbs() * d.cwiseAbs()).dot(d.cwiseAbs());
  return {quad - rhs, 1.0 + mag + rhs};
}

ScaledMargin check_A4_tangent(const BellmanModel& model, const TriplePoint& x, const TriplePoint& x1) {
  const double a = model.eval_A(x), a1 = model.eval_A(x1);
  const Vector3 g = model.grad_A(x);
  const Vector3 dx = x1.vector() - x.vector();
  const double lin = g.dot(dx);
  const double rhs = (2.0 / 3.0) * x.u() * std::abs(x1.v() - x.v()) * std::abs(x1.w() - x.w());
  const double mag = g.cwiseAbs().dot(dx.cwiseAbs());
  return {a1 - a - lin - rhs, 1.0 + std::abs(a1) + std::abs(a) + mag + rhs};
}

ScaledMargin check_B_main(const BellmanModel& model, const BellmanPoint& x, const BellmanPoint& x1,
                          const BellmanPoint& x2) {
  for (std::size_t i = 0; i < 6; ++i) {
    const double mid = 0.5 * (x1.array()[i] + x2.array()[i]);
    if (std::abs(mid - x.array()[i]) > 1e-12 * (1.0 + std::abs(mid))) {
      throw DomainError("main inequality needs x to be the midpoint of x1 and x2");
    }
  }
  const double b = model.eval_B(x), b1 = model.eval_B(x1), b2 = model.eval_B(x2);
  const double rhs = x.u() * 0.5 * std::abs(x1.v() - x2.v()) * 0.5 * std::abs(x1.w() - x2.w());
  const double mag = model.linear_part(x) + model.linear_part(x1) + model.linear_part(x2) +
                     model.eval_A(x.triple()) + model.eval_A(x1.triple()) + model.eval_A(x2.triple());
  return {b - 0.5 * b1 - 0.5 * b2 - rhs, 1.0 + std::abs(mag) + rhs};
}

ScaledMargin check_B_infinitesimal(const BellmanModel& model, const BellmanPoint& x, const Vector6& d,
                                   double margin) {
  const Matrix6 h = model.hess_B(x, margin);
  const double quad = -d.dot(h * d);
  const double rhs = 2.0 * x.u() * std::abs(d[1]) * std::abs(d[2]);
  const double mag = (h.cwiseAbs() * d.cwiseAbs()).dot(d.cwiseAbs());
  return {quad - rhs, 1.0 + mag + rhs};
}

ScaledMargin check_B4(const BellmanModel& model, const BellmanPoint& x, const BellmanPoint& x1) {
  const double b = model.eval_B(x), b1 = model.eval_B(x1);
  const Vector6 g = model.grad_B(x);
  Vector6 dx;
  for (int i = 0; i < 6; ++i) dx[i] = x1.array()[i] - x.array()[i];
  const double lin = g.dot(dx);
  const double rhs = (2.0 / 3.0) * x.u() * std::abs(x1.v() - x.v()) * std::abs(x1.w() - x.w());
  const double mag = model.linear_part(x) + model.linear_part(x1) + model.eval_A(x.triple()) +
                     model.eval_A(x1.triple()) + g.cwiseAbs().dot(dx.cwiseAbs());
  return {b + lin - b1 - rhs, 1.0 + mag + rhs};
}

TriplePoint sample_triple(Rng& rng, const Exponents& e, double log_lo, double log_hi,
                          double degenerate_fraction) {
  double u = log_uniform(rng, log_lo, log_hi);
  double v = log_uniform(rng, log_lo, log_hi);
  double w = log_uniform(rng, log_lo, log_hi);
  if (uniform01(rng) >= degenerate_fraction) return {u, v, w};

  const int kind = static_cast<int>(uniform01(rng) * 4.0);
  const double p = e.p(), q = e.q(), r = e.r();
  if (kind <= 1) {
    // On (kind 0) or at relative gap 1e-4 (kind 1) from a critical surface.
    const double factor = kind == 0 ? 1.0 : (uniform01(rng) < 0.5 ? 1.0 - 1e-4 : 1.0 + 1e-4);
    switch (static_cast<int>(uniform01(rng) * 3.0)) {
      case 0: v = std::pow(std::pow(u, p) * factor, 1.0 / q); break;
      case 1: w = std::pow(std::pow(u, p) * factor, 1.0 / r); break;
      default: w = std::pow(std::pow(v, q) * factor, 1.0 / r); break;
    }
  } else {
    // On (kind 2) or near (kind 3) a coordinate plane.
    const double value = kind == 2 ? 0.0 : log_lo * 1e-4;
    switch (static_cast<int>(uniform01(rng) * 3.0)) {
      case 0: u = value; break;
      case 1: v = value; break;
      default: w = value; break;
    }
  }
  return {u, v, w};
}

BellmanPoint sample_bellman_point(Rng& rng, const Exponents& e, double log_lo, double log_hi,
                                  double degenerate_fraction) {
  const TriplePoint x = sample_triple(rng, e, log_lo, log_hi, degenerate_fraction);
  auto lift = [&](double base, double power) {
    const double floor = std::pow(base, power);
    if (uniform01(rng) < 0.2) return floor;  // Jensen equality: the function is constant
    const double excess = log_uniform(rng, 1e-4, 1e2);
    return floor == 0.0 ? std::pow(log_uniform(rng, log_lo, log_hi), power) * excess : floor * (1.0 + excess);
  };
  const double big_u = lift(x.u(), e.p());
  const double big_v = lift(x.v(), e.q());
  const double big_w = lift(x.w(), e.r());
  return BellmanPoint(e, x.u(), x.v(), x.w(), big_u, big_v, big_w);
}

PropertyResult check_C1_across_surfaces(const BellmanModel& model, Surface surface, std::size_t samples,
                                        std::uint64_t seed, const C1Tolerance& tol, double log_lo,
                                        double log_hi) {
  if (samples < 1) throw ConstraintViolation("C1 check needs at least one sample");
  const Exponents& e = model.exponents();
  const double p = e.p(), q = e.q(), r = e.r();
  std::string name = "C1 across ";
  name += to_string(surface);

  auto draw = [&](Rng& rng) -> std::optional<PropertyInstance> {
    const double x0 = log_uniform(rng, log_lo, log_hi);
    const double x1 = log_uniform(rng, log_lo, log_hi);
    double u = 0, v = 0, w = 0;
    Region side_a = Region::Boundary, side_b = Region::Boundary;
    switch (surface) {
      case Surface::UV: {
        u = x0;
        v = std::pow(u, p / q);
        w = x1;
        const bool third_below = std::pow(w, r) < std::pow(u, p);
        side_a = third_below ? Region::R2 : Region::R5;
        side_b = third_below ? Region::R3 : Region::R6;
        break;
      }
      case Surface::UW: {
        u = x0;
        w = std::pow(u, p / r);
        v = x1;
        const bool third_below = std::pow(v, q) < std::pow(u, p);
        side_a = third_below ? Region::R4 : Region::R1;
        side_b = third_below ? Region::R5 : Region::R2;
        break;
      }
      case Surface::VW: {
        v = x0;
        w = std::pow(v, q / r);
        u = x1;
        const bool third_below = std::pow(u, p) < std::pow(v, q);
        side_a = third_below ? Region::R1 : Region::R3;
        side_b = third_below ? Region::R6 : Region::R4;
        break;
      }
    }
    const TriplePoint pt(u, v, w);
    const double a = model.eval_A(pt);
    const double va = model.eval_A_branch(side_a, pt), vb = model.eval_A_branch(side_b, pt);
    const Vector3 ga = model.grad_A_branch(side_a, pt), gb = model.grad_A_branch(side_b, pt);
    const std::array<double, 3> xs{u, v, w};

    double ratio = std::abs(va - vb) / (tol.value_rel * (1.0 + std::abs(a)));
    for (int i = 0; i < 3; ++i) {
      const double sc = natural_scale(ga[i], a, xs[i]);
      ratio = std::max(ratio, std::abs(ga[i] - gb[i]) / (tol.branch_rel * sc));
      auto plus = xs, minus = xs;
      const double h = tol.fd_step * xs[i];
      plus[i] += h;
      minus[i] -= h;
      const double fd = (model.eval_A({plus[0], plus[1], plus[2]}) - model.eval_A({minus[0], minus[1], minus[2]})) /
                        (plus[i] - minus[i]);
      ratio = std::max(ratio, std::abs(fd - ga[i]) / (tol.fd_rel * sc));
      ratio = std::max(ratio, std::abs(fd - gb[i]) / (tol.fd_rel * sc));
    }
    return PropertyInstance{{1.0 - ratio, 1.0}, {u, v, w}};
  };
  return scan_property(std::move(name), samples, seed, 1, 100, 0.0, draw);
}

std::vector<PropertyResult> run_suite(const Coefficients& c, const Exponents& e, const PropertyConfig& cfg) {
  const BellmanModel model(c, e);
  const double lo = cfg.log_lo, hi = cfg.log_hi, df = cfg.degenerate_fraction;
  std::vector<PropertyResult> out;
  std::uint64_t index = 0;
  auto next_seed = [&] { return cfg.seed + index++; };
  auto run = [&](std::string name, std::size_t samples, auto&& draw) {
    out.push_back(scan_property(std::move(name), samples, next_seed(), cfg.threads, cfg.max_witnesses, cfg.tol, draw));
  };

  run("A2 lower", cfg.samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const TriplePoint x = sample_triple(rng, e, lo, hi, df);
    return PropertyInstance{check_A2(model, x).lower, concat({x.array()})};
  });
  run("A2 upper", cfg.samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const TriplePoint x = sample_triple(rng, e, lo, hi, df);
    return PropertyInstance{check_A2(model, x).upper, concat({x.array()})};
  });
  run("A3 midpoint", cfg.samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const TriplePoint x1 = sample_triple(rng, e, lo, hi, df);
    TriplePoint x2 = sample_triple(rng, e, lo, hi, df);
    if (uniform01(rng) < df) {
      // Local split: x2 within a few percent of x1, where the infinitesimal
      // form of the inequality is tight.
      const double k = 0.05;
      x2 = TriplePoint(x1.u() * (1.0 + k * uniform(rng, -1, 1)), x1.v() * (1.0 + k * uniform(rng, -1, 1)),
                       x1.w() * (1.0 + k * uniform(rng, -1, 1)));
    }
    return PropertyInstance{check_A3_midpoint(model, x1, x2), concat({x1.array(), x2.array()})};
  });
  run("A3' infinitesimal", cfg.samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const TriplePoint x = sample_triple(rng, e, lo, hi, df);
    std::normal_distribution<double> n01;
    const Vector3 d(n01(rng) * x.u(), n01(rng) * x.v(), n01(rng) * x.w());
    if (!hessian_safe(x, e, cfg.hessian_margin)) return std::nullopt;
    return PropertyInstance{check_A3_infinitesimal(model, x, d, cfg.hessian_margin),
                    concat({x.array(), {d[0], d[1], d[2]}})};
  });
  run("A4 tangent", cfg.samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const TriplePoint x = sample_triple(rng, e, lo, hi, df);
    const TriplePoint x1 = sample_triple(rng, e, lo, hi, df);
    return PropertyInstance{check_A4_tangent(model, x, x1), concat({x.array(), x1.array()})};
  });
  run("B3 main", cfg.samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const BellmanPoint x1 = sample_bellman_point(rng, e, lo, hi, df);
    const BellmanPoint x2 = uniform01(rng) < 0.05 ? x1 : sample_bellman_point(rng, e, lo, hi, df);
    const auto& a1 = x1.array();
    const auto& a2 = x2.array();
    const BellmanPoint x(e, 0.5 * (a1[0] + a2[0]), 0.5 * (a1[1] + a2[1]), 0.5 * (a1[2] + a2[2]),
                         0.5 * (a1[3] + a2[3]), 0.5 * (a1[4] + a2[4]), 0.5 * (a1[5] + a2[5]));
    return PropertyInstance{check_B_main(model, x, x1, x2), concat6({a1, a2})};
  });
  run("B3' infinitesimal", cfg.samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const BellmanPoint x = sample_bellman_point(rng, e, lo, hi, df);
    std::normal_distribution<double> n01;
    Vector6 d;
    for (int i = 0; i < 6; ++i) d[i] = n01(rng) * (1.0 + x.array()[i]);
    if (!hessian_safe(x.triple(), e, cfg.hessian_margin)) return std::nullopt;
    return PropertyInstance{check_B_infinitesimal(model, x, d, cfg.hessian_margin), concat6({x.array()})};
  });
  run("B4 tangent", cfg.samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const BellmanPoint x = sample_bellman_point(rng, e, lo, hi, df);
    const BellmanPoint x1 = sample_bellman_point(rng, e, lo, hi, df);
    return PropertyInstance{check_B4(model, x, x1), concat6({x.array(), x1.array()})};
  });
  for (Surface s : {Surface::UV, Surface::UW, Surface::VW}) {
    out.push_back(check_C1_across_surfaces(model, s, cfg.c1_samples, next_seed(), {}, lo, hi));
  }

  // Mollified function A_eps on (eps, inf)^3.
  const Mollifier moll(cfg.mollifier_eps, cfg.mollifier_nodes);
  const double mlo = std::max(lo, 2.0 * cfg.mollifier_eps);
  const double mhi = std::min(hi, 1e1);
  run("A_eps A3 midpoint", cfg.mollifier_samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const TriplePoint x1(log_uniform(rng, mlo, mhi), log_uniform(rng, mlo, mhi), log_uniform(rng, mlo, mhi));
    const TriplePoint x2(log_uniform(rng, mlo, mhi), log_uniform(rng, mlo, mhi), log_uniform(rng, mlo, mhi));
    const TriplePoint x(0.5 * (x1.u() + x2.u()), 0.5 * (x1.v() + x2.v()), 0.5 * (x1.w() + x2.w()));
    const double a1 = moll.value(model, x1), a2 = moll.value(model, x2), a = moll.value(model, x);
    const double rhs = x.u() * 0.25 * std::abs(x1.v() - x2.v()) * std::abs(x1.w() - x2.w());
    return PropertyInstance{{0.5 * a1 + 0.5 * a2 - a - rhs, 1.0 + 0.5 * std::abs(a1) + 0.5 * std::abs(a2) + std::abs(a) + rhs},
                    concat({x1.array(), x2.array()})};
  });
  run("A_eps A3' infinitesimal", cfg.mollifier_samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const TriplePoint x(log_uniform(rng, mlo, mhi), log_uniform(rng, mlo, mhi), log_uniform(rng, mlo, mhi));
    std::normal_distribution<double> n01;
    const Vector3 d(n01(rng), n01(rng), n01(rng));
    const Matrix3 h = moll.hessian(model, x);
    const double rhs = 2.0 * x.u() * std::abs(d[1]) * std::abs(d[2]);
    const double mag = (h.cwiseAbs() * d.cwiseAbs()).dot(d.cwiseAbs());
    return PropertyInstance{{d.dot(h * d) - rhs, 1.0 + mag + rhs}, concat({x.array(), {d[0], d[1], d[2]}})};
  });
  run("A_eps >= A deep in R1", cfg.mollifier_samples, [&](Rng& rng) -> std::optional<PropertyInstance> {
    const double eps = cfg.mollifier_eps;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double u = log_uniform(rng, mlo, mhi), v = log_uniform(rng, mlo, mhi), w = log_uniform(rng, mlo, mhi);
      const bool deep = std::pow(u + eps, e.p()) < std::pow(w - eps, e.r()) &&
                        std::pow(w + eps, e.r()) < std::pow(v - eps, e.q());
      if (!deep) continue;
      const TriplePoint x(u, v, w);
      const double ae = moll.value(model, x), a = model.eval_A(x);
      return PropertyInstance{{ae - a, 1.0 + std::abs(ae) + std::abs(a)}, concat({x.array()})};
    }
    return std::nullopt;
  });
  return out;
}

}  // namespace bellman
