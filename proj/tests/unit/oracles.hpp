#pragma once

// Independent reference implementations used only by the tests.

#include <cmath>
#include <functional>
#include <vector>

#include "bellman/bellman_function.hpp"

namespace oracle {

// The six-branch formula written out with std::pow, branch chosen by the
// non-strict chains in order.
inline double explicit_A(double A, double B, double C, double p, double q, double r, double u, double v, double w) {
  using std::pow;
  const double a = pow(u, p), b = pow(v, q), c = pow(w, r);
  if (a <= c && c <= b) return A * a + B * b + C * c;
  if (c <= a && a <= b) return (A * (p - 1) - C) / (p - 1) * a + B * b + C * p / (p - 1) * u * pow(w, r - r / p);
  if (c <= b && b <= a) {
    return (A * (p - 1) - (B + C)) / (p - 1) * a + B * p / (p - 1) * u * pow(v, q - q / p) +
           C * p / (p - 1) * u * pow(w, r - r / p);
  }
  if (b <= c && c <= a) {
    return (A * (p - 1) - (B + C)) / (p - 1) * a + B * q / 2 * u * v * v * pow(w, 1 - r / q) +
           (2 * C * p * r - B * p * (q - r)) / (2 * r * (p - 1)) * u * pow(w, r - r / p);
  }
  if (b <= a && a <= c) {
    return (2 * A * r * (p - 1) - B * (q + r)) / (2 * r * (p - 1)) * a +
           B * q * q / (2 * p * (q - 2)) * pow(u, p - 2 * p / q) * v * v +
           B * q * (q - r) / (2 * r * (q - 2)) * v * v * pow(w, r - 2 * r / q) + (2 * C * r - B * (q - r)) / (2 * r) * c;
  }
  return A * a + B * q / (p * (q - 2)) * b + B * q * (q - r) / (2 * r * (q - 2)) * v * v * pow(w, r - 2 * r / q) +
         (2 * C * r - B * (q - r)) / (2 * r) * c;
}

inline double explicit_A(const bellman::Coefficients& c, const bellman::Exponents& e, double u, double v, double w) {
  return explicit_A(c.a(), c.b(), c.c(), e.p(), e.q(), e.r(), u, v, w);
}

// Central difference of f along coordinate i.
inline double central_diff(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                           std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double fp = f(x);
  x[i] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2 * h);
}

}  // namespace oracle
