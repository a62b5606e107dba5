#pragma once

namespace bellman {

// A triple (p, q, r) of Hölder-conjugate exponents in the right half of the
// Banach triangle: 1 < p, q, r < inf, q > r, 1/p + 1/q + 1/r = 1.
class Exponents {
 public:
  // Validates the triple; throws ConstraintViolation naming the failed check.
  Exponents(double p, double q, double r);

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  double r() const noexcept { return r_; }

  // Conjugate of r, the exponent of the bilinear paraproduct's target space.
  double r_conjugate() const noexcept { return r_ / (r_ - 1.0); }

  friend bool operator==(const Exponents&, const Exponents&) = default;

 private:
  double p_;
  double q_;
  double r_;
};

inline constexpr double kExponentSumTolerance = 1e-12;

// Positive coefficients (A, B, C) of the explicit Bellman function.
class Coefficients {
 public:
  Coefficients(double a, double b, double c);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }

  Coefficients scaled(double lambda) const { return {lambda * a_, lambda * b_, lambda * c_}; }

  friend bool operator==(const Coefficients&, const Coefficients&) = default;

 private:
  double a_;
  double b_;
  double c_;
};

// A = 88 q^4 r / ((p-1)(r-1)(q-r)),  B = 1,  C = 11 q^3 r / ((r-1)(q-r)).
Coefficients coefficients_default(const Exponents& e);

// max{Ap, Bq, Cr}; the constant in the normalized trilinear estimate.
double c_constant(const Coefficients& c, const Exponents& e);

// Closed form 88 p q^4 r / ((p-1)(r-1)(q-r)) of c_constant at the defaults.
double c_constant_default_closed_form(const Exponents& e);

// Lower bounds that keep the sign-sensitive ("circled") minor terms
// non-negative: C >= B(q-r)/(2r) and A >= B(q+r)/(2r(p-1)).
double circled_lower_bound_c(const Exponents& e, double b);
double circled_lower_bound_a(const Exponents& e, double b);
bool satisfies_circled_conditions(const Coefficients& c, const Exponents& e);

}  // namespace bellman
