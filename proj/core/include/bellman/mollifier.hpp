#pragma once

#include <cstddef>
#include <vector>

#include "bellman/bellman_function.hpp"

namespace bellman {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
QuadratureRule gauss_legendre(std::size_t n);

// exp(-1/(1-y^2)) on (-1, 1), zero elsewhere. Not normalized.
double bump(double y);
// Integral of bump over (-1, 1), about 0.443994.
double bump_integral();

// Even product mollifier phi_eps(a, b, c) = eps^-3 phi(a/eps) phi(b/eps) phi(c/eps)
// discretized by a tensor Gauss-Legendre rule. Per-axis weights are
// renormalized to sum to one, so constants are reproduced exactly and the
// discrete measure stays even.
class Mollifier {
 public:
  Mollifier(double eps, std::size_t nodes);

  double eps() const noexcept { return eps_; }
  std::size_t nodes() const noexcept { return offsets_.size(); }

  // Throws DomainError unless min(u, v, w) > eps.
  double value(const BellmanModel& model, const TriplePoint& x) const;
  Vector3 gradient(const BellmanModel& model, const TriplePoint& x) const;
  // Mollification of the piecewise Hessian of A; classical second
  // derivatives of A_eps.
  Matrix3 hessian(const BellmanModel& model, const TriplePoint& x) const;

 private:
  template <typename Fn>
  void for_each_node(const TriplePoint& x, Fn&& fn) const;

  double eps_;
  std::vector<double> offsets_;  // eps * y_i
  std::vector<double> weights_;  // normalized phi(y_i) w_i
};

struct MollifiedValue {
  double value = 0.0;
  double rel_change = 0.0;  // |A_eps(2n) - A_eps(n)| / |A_eps(2n)|
  bool quadrature_warning = false;
};

inline constexpr double kMollifierConvergenceTolerance = 1e-8;

// A_eps(x) with `nodes` points per axis; the value is re-evaluated with twice
// the nodes and quadrature_warning is set if it moves by more than 1e-8
// relative. Throws DomainError if min(u, v, w) <= eps, ConstraintViolation if
// nodes < 8.
MollifiedValue mollify_A(const Coefficients& c, const Exponents& e, double eps, const TriplePoint& x,
                         std::size_t nodes);
MollifiedValue mollify_A(const BellmanModel& model, double eps, const TriplePoint& x, std::size_t nodes);

}  // namespace bellman
