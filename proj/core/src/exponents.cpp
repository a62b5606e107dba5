#include "bellman/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bellman/errors.hpp"

namespace bellman {

Exponents::Exponents(double p, double q, double r) : p_(p), q_(q), r_(r) {
  auto fail = [&](const char* what) {
    std::ostringstream os;
    os.precision(17);
    os << "invalid exponents (" << p << ", " << q << ", " << r << "): " << what;
    throw ConstraintViolation(os.str());
  };
  if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(r)) fail("exponents must be finite");
  if (!(p > 1.0)) fail("p > 1 fails");
  if (!(q > 1.0)) fail("q > 1 fails");
  if (!(r > 1.0)) fail("r > 1 fails");
  if (!(q > r)) fail("q > r fails");
  if (std::abs(1.0 / p + 1.0 / q + 1.0 / r - 1.0) > kExponentSumTolerance) {
    fail("1/p + 1/q + 1/r = 1 fails");
  }
}

Coefficients::Coefficients(double a, double b, double c) : a_(a), b_(b), c_(c) {
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
      !std::isfinite(c)) {
    std::ostringstream os;
    os.precision(17);
    os << "coefficients must be finite and positive, got (" << a << ", " << b << ", " << c << ")";
    throw ConstraintViolation(os.str());
  }
}

Coefficients coefficients_default(const Exponents& e) {
  const double p = e.p(), q = e.q(), r = e.r();
  const double q3 = q * q * q;
  const double a = 88.0 * q3 * q * r / ((p - 1.0) * (r - 1.0) * (q - r));
  const double c = 11.0 * q3 * r / ((r - 1.0) * (q - r));
  return {a, 1.0, c};
}

double c_constant(const Coefficients& c, const Exponents& e) {
  return std::max({c.a() * e.p(), c.b() * e.q(), c.c() * e.r()});
}

double c_constant_default_closed_form(const Exponents& e) {
  const double p = e.p(), q = e.q(), r = e.r();
  return 88.0 * p * q * q * q * q * r / ((p - 1.0) * (r - 1.0) * (q - r));
}

double circled_lower_bound_c(const Exponents& e, double b) {
  return b * (e.q() - e.r()) / (2.0 * e.r());
}

double circled_lower_bound_a(const Exponents& e, double b) {
  return b * (e.q() + e.r()) / (2.0 * e.r() * (e.p() - 1.0));
}

bool satisfies_circled_conditions(const Coefficients& c, const Exponents& e) {
  return c.c() >= circled_lower_bound_c(e, c.b()) && c.a() >= circled_lower_bound_a(e, c.b());
}

}  // namespace bellman
