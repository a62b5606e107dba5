#include "bellman/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bellman/errors.hpp"

namespace bellman {

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw ConstraintViolation("Gauss-Legendre rule needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double bump(double y) {
  if (!(std::abs(y) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - y * y));
}

double bump_integral() {
  static const double value = [] {
    const QuadratureRule rule = gauss_legendre(256);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * bump(rule.nodes[i]);
    return s;
  }();
  return value;
}

Mollifier::Mollifier(double eps, std::size_t nodes) : eps_(eps) {
  if (!(eps > 0.0)) throw DomainError("mollifier scale eps must be positive");
  if (nodes < 8) throw ConstraintViolation("mollifier needs at least 8 nodes per axis");
  const QuadratureRule rule = gauss_legendre(nodes);
  offsets_.resize(nodes);
  weights_.resize(nodes);
  double total = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    offsets_[i] = eps * rule.nodes[i];
    weights_[i] = rule.weights[i] * bump(rule.nodes[i]);
    total += weights_[i];
  }
  for (double& w : weights_) w /= total;
}

template <typename Fn>
void Mollifier::for_each_node(const TriplePoint& x, Fn&& fn) const {
  if (!(std::min({x.u(), x.v(), x.w()}) > eps_)) {
    throw DomainError("mollified function is defined only for u, v, w > eps");
  }
  const std::size_t n = offsets_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double wij = weights_[i] * weights_[j];
      for (std::size_t k = 0; k < n; ++k) {
        fn(wij * weights_[k], TriplePoint(x.u() - offsets_[i], x.v() - offsets_[j], x.w() - offsets_[k]));
      }
    }
  }
}

double Mollifier::value(const BellmanModel& model, const TriplePoint& x) const {
  double s = 0.0;
  for_each_node(x, [&](double w, const TriplePoint& y) { s += w * model.eval_A(y); });
  return s;
}

Vector3 Mollifier::gradient(const BellmanModel& model, const TriplePoint& x) const {
  Vector3 g = Vector3::Zero();
  for_each_node(x, [&](double w, const TriplePoint& y) { g += w * model.grad_A(y); });
  return g;
}

Matrix3 Mollifier::hessian(const BellmanModel& model, const TriplePoint& x) const {
  Matrix3 h = Matrix3::Zero();
  const Exponents& e = model.exponents();
  for_each_node(x, [&](double w, const TriplePoint& y) {
    h += w * model.hess_A_branch(dispatch_region(y, e), y);
  });
  return h;
}

MollifiedValue mollify_A(const BellmanModel& model, double eps, const TriplePoint& x, std::size_t nodes) {
  const double coarse = Mollifier(eps, nodes).value(model, x);
  const double fine = Mollifier(eps, 2 * nodes).value(model, x);
  MollifiedValue out;
  out.value = coarse;
  out.rel_change = fine == 0.0 ? std::abs(fine - coarse) : std::abs(fine - coarse) / std::abs(fine);
  out.quadrature_warning = out.rel_change > kMollifierConvergenceTolerance;
  return out;
}

MollifiedValue mollify_A(const Coefficients& c, const Exponents& e, double eps, const TriplePoint& x,
                         std::size_t nodes) {
  return mollify_A(BellmanModel(c, e), eps, x, nodes);
}

}  // namespace bellman
