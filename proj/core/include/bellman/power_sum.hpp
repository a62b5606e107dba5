#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>

namespace bellman {

// One term coef * x_0^e_0 * ... * x_{N-1}^e_{N-1} of a generalized polynomial
// with real exponents on the closed positive orthant.
template <std::size_t N>
struct PowerTerm {
  double coef = 0.0;
  std::array<double, N> exps{};
};

// Fixed-capacity sum of PowerTerms with closed-form first and second
// derivatives. Zero bases follow the continuous-extension convention used by
// the explicit Bellman function: a term containing a vanishing factor with a
// positive exponent is zero even if another factor's exponent is negative.
// Inside every closed region where such a term is active the vanishing factor
// dominates, so this is the limit value and not merely a convention.
template <std::size_t N, std::size_t Capacity = 4>
class PowerSum {
 public:
  using Point = std::array<double, N>;
  using Gradient = std::array<double, N>;
  using Hessian = std::array<std::array<double, N>, N>;

  constexpr PowerSum() = default;
  PowerSum(std::initializer_list<PowerTerm<N>> terms) {
    for (const auto& t : terms) push(t);
  }

  void push(const PowerTerm<N>& t) { terms_[size_++] = t; }
  std::size_t size() const noexcept { return size_; }
  const PowerTerm<N>& term(std::size_t i) const { return terms_[i]; }

  double value(const Point& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < size_; ++k) s += monomial(terms_[k].coef, terms_[k].exps, x);
    return s;
  }

  Gradient gradient(const Point& x) const {
    Gradient g{};
    for (std::size_t k = 0; k < size_; ++k) {
      const auto& t = terms_[k];
      for (std::size_t i = 0; i < N; ++i) {
        if (t.exps[i] == 0.0) continue;
        auto e = t.exps;
        e[i] -= 1.0;
        g[i] += monomial(t.coef * t.exps[i], e, x);
      }
    }
    return g;
  }

  Hessian hessian(const Point& x) const {
    Hessian h{};
    for (std::size_t k = 0; k < size_; ++k) {
      const auto& t = terms_[k];
      for (std::size_t i = 0; i < N; ++i) {
        if (t.exps[i] == 0.0) continue;
        for (std::size_t j = i; j < N; ++j) {
          double factor = t.exps[i];
          auto e = t.exps;
          e[i] -= 1.0;
          factor *= e[j];
          if (factor == 0.0) continue;
          e[j] -= 1.0;
          h[i][j] += monomial(t.coef * factor, e, x);
        }
      }
    }
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < i; ++j) h[i][j] = h[j][i];
    return h;
  }

 private:
  static double monomial(double coef, const std::array<double, N>& e, const Point& x) {
    double prod = coef;
    bool vanishing = false;
    for (std::size_t i = 0; i < N; ++i) {
      if (e[i] == 0.0) continue;
      if (x[i] == 0.0) {
        if (e[i] > 0.0) vanishing = true;
        else prod *= std::numeric_limits<double>::infinity();
        continue;
      }
      prod *= (e[i] == 1.0) ? x[i] : (e[i] == 2.0 ? x[i] * x[i] : std::pow(x[i], e[i]));
    }
    return vanishing ? 0.0 : prod;
  }

  std::array<PowerTerm<N>, Capacity> terms_{};
  std::size_t size_ = 0;
};

}  // namespace bellman
