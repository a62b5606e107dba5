#include "bellman/bellman_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bellman/errors.hpp"

namespace bellman {
namespace {

double rel_gap(double x, double y) {
  const double m = std::max(std::abs(x), std::abs(y));
  return m == 0.0 ? 0.0 : std::abs(x - y) / m;
}

// Region from the three powers a = u^p, b = v^q, c = w^r.
Region region_from_powers_strict(double a, double b, double c, double tol) {
  if (rel_gap(a, b) <= tol || rel_gap(a, c) <= tol || rel_gap(b, c) <= tol) return Region::Boundary;
  if (a < c && c < b) return Region::R1;
  if (c < a && a < b) return Region::R2;
  if (c < b && b < a) return Region::R3;
  if (b < c && c < a) return Region::R4;
  if (b < a && a < c) return Region::R5;
  return Region::R6;
}

Region region_from_powers_dispatch(double a, double b, double c) {
  if (a <= c && c <= b) return Region::R1;
  if (c <= a && a <= b) return Region::R2;
  if (c <= b && b <= a) return Region::R3;
  if (b <= c && c <= a) return Region::R4;
  if (b <= a && a <= c) return Region::R5;
  return Region::R6;
}

std::array<double, 3> powers(const TriplePoint& x, const Exponents& e) {
  return {std::pow(x.u(), e.p()), std::pow(x.v(), e.q()), std::pow(x.w(), e.r())};
}

std::size_t index_of(Region region) {
  if (region == Region::Boundary) throw DomainError("no branch formula for Region::Boundary");
  return static_cast<std::size_t>(region) - 1;
}

Matrix3 to_matrix(const PowerSum<3>::Hessian& h) {
  Matrix3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = h[i][j];
  return m;
}

}  // namespace

TriplePoint::TriplePoint(double u, double v, double w) : u_(u), v_(v), w_(w) {
  if (!(u >= 0.0) || !(v >= 0.0) || !(w >= 0.0) || !std::isfinite(u) || !std::isfinite(v) ||
      !std::isfinite(w)) {
    std::ostringstream os;
    os.precision(17);
    os << "triple point must lie in [0, inf)^3, got (" << u << ", " << v << ", " << w << ")";
    throw DomainError(os.str());
  }
}

BellmanPoint::BellmanPoint(const Exponents& e, double u, double v, double w, double big_u,
                           double big_v, double big_w)
    : x_{u, v, w, big_u, big_v, big_w} {
  for (double c : x_) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("Bellman point coordinates must be finite and non-negative");
  }
  if (!in_domain(e)) {
    std::ostringstream os;
    os.precision(17);
    os << "Bellman point outside domain: need u^p <= U, v^q <= V, w^r <= W at (" << u << ", " << v
       << ", " << w << ", " << big_u << ", " << big_v << ", " << big_w << ")";
    throw DomainError(os.str());
  }
}

bool BellmanPoint::in_domain(const Exponents& e) const {
  return std::pow(x_[0], e.p()) <= x_[3] && std::pow(x_[1], e.q()) <= x_[4] &&
         std::pow(x_[2], e.r()) <= x_[5];
}

GammaPoint::GammaPoint(double t, double s) : t_(t), s_(s) {
  if (!(t > 0.0) || !(s > 0.0) || !std::isfinite(t) || !std::isfinite(s)) {
    throw DomainError("gamma point requires t, s > 0");
  }
}

std::string_view to_string(Region region) {
  switch (region) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    case Region::R3: return "R3";
    case Region::R4: return "R4";
    case Region::R5: return "R5";
    case Region::R6: return "R6";
    case Region::Boundary: return "Boundary";
  }
  return "?";
}

Region classify_region(const TriplePoint& x, const Exponents& e, double tol) {
  if (x.u() == 0.0 || x.v() == 0.0 || x.w() == 0.0) {
    throw DomainError("region classification is undefined on coordinate planes");
  }
  const auto [a, b, c] = powers(x, e);
  return region_from_powers_strict(a, b, c, tol);
}

Region classify_gamma_region(const GammaPoint& g, double tol) {
  return region_from_powers_strict(1.0, g.t(), g.s(), tol);
}

Region dispatch_region(const TriplePoint& x, const Exponents& e) {
  const auto [a, b, c] = powers(x, e);
  return region_from_powers_dispatch(a, b, c);
}

Region dispatch_gamma_region(const GammaPoint& g) {
  return region_from_powers_dispatch(1.0, g.t(), g.s());
}

bool hessian_safe(const TriplePoint& x, const Exponents& e, double margin) {
  const double lo = std::min({x.u(), x.v(), x.w()});
  const double hi = std::max({x.u(), x.v(), x.w()});
  if (!(lo > 0.0) || !(lo > margin * hi)) return false;
  const auto [a, b, c] = powers(x, e);
  return rel_gap(a, b) > margin && rel_gap(a, c) > margin && rel_gap(b, c) > margin;
}

BellmanModel::BellmanModel(const Coefficients& c, const Exponents& e)
    : c_(c), e_(e), big_c_(bellman::c_constant(c, e)) {
  const double p = e.p(), q = e.q(), r = e.r();
  const double A = c.a(), B = c.b(), C = c.c();

  const double k2 = (A * (p - 1.0) - C) / (p - 1.0);
  const double k3 = (A * (p - 1.0) - (B + C)) / (p - 1.0);
  const double k5 = (2.0 * A * r * (p - 1.0) - B * (q + r)) / (2.0 * r * (p - 1.0));
  const double cw_p = C * p / (p - 1.0);                       // u w^{r - r/p}
  const double cv_p = B * p / (p - 1.0);                       // u v^{q - q/p}
  const double c4w = (2.0 * C * p * r - B * p * (q - r)) / (2.0 * r * (p - 1.0));
  const double c5uv = B * q * q / (2.0 * p * (q - 2.0));       // u^{p - 2p/q} v^2
  const double cvw = B * q * (q - r) / (2.0 * r * (q - 2.0));  // v^2 w^{r - 2r/q}
  const double cw = (2.0 * C * r - B * (q - r)) / (2.0 * r);   // w^r
  const double c6v = B * q / (p * (q - 2.0));                  // v^q

  const double ew = r - r / p;
  const double ev = q - q / p;
  const double evw = r - 2.0 * r / q;

  a_branches_[0] = {{A, {p, 0, 0}}, {B, {0, q, 0}}, {C, {0, 0, r}}};
  a_branches_[1] = {{k2, {p, 0, 0}}, {B, {0, q, 0}}, {cw_p, {1, 0, ew}}};
  a_branches_[2] = {{k3, {p, 0, 0}}, {cv_p, {1, ev, 0}}, {cw_p, {1, 0, ew}}};
  a_branches_[3] = {{k3, {p, 0, 0}}, {B * q / 2.0, {1, 2, 1.0 - r / q}}, {c4w, {1, 0, ew}}};
  a_branches_[4] = {{k5, {p, 0, 0}}, {c5uv, {p - 2.0 * p / q, 2, 0}}, {cvw, {0, 2, evw}}, {cw, {0, 0, r}}};
  a_branches_[5] = {{A, {p, 0, 0}}, {c6v, {0, q, 0}}, {cvw, {0, 2, evw}}, {cw, {0, 0, r}}};

  // gamma(t, s) = A(u, v, w) / u^p, transcribed branch by branch.
  const double es = 1.0 - 1.0 / p;
  gamma_branches_[0] = {{A, {0, 0}}, {B, {1, 0}}, {C, {0, 1}}};
  gamma_branches_[1] = {{k2, {0, 0}}, {B, {1, 0}}, {cw_p, {0, es}}};
  gamma_branches_[2] = {{k3, {0, 0}}, {cv_p, {es, 0}}, {cw_p, {0, es}}};
  gamma_branches_[3] = {{k3, {0, 0}}, {B * q / 2.0, {2.0 / q, 1.0 / r - 1.0 / q}}, {c4w, {0, es}}};
  gamma_branches_[4] = {{k5, {0, 0}}, {c5uv, {2.0 / q, 0}}, {cvw, {2.0 / q, 1.0 - 2.0 / q}}, {cw, {0, 1}}};
  gamma_branches_[5] = {{A, {0, 0}}, {c6v, {1, 0}}, {cvw, {2.0 / q, 1.0 - 2.0 / q}}, {cw, {0, 1}}};
}

const PowerSum<3>& BellmanModel::a_branch(Region region) const { return a_branches_[index_of(region)]; }

const PowerSum<2>& BellmanModel::gamma_branch(Region region) const {
  return gamma_branches_[index_of(region)];
}

double BellmanModel::eval_A(const TriplePoint& x) const {
  return a_branch(dispatch_region(x, e_)).value(x.array());
}

double BellmanModel::eval_A_branch(Region region, const TriplePoint& x) const {
  return a_branch(region).value(x.array());
}

Vector3 BellmanModel::grad_A(const TriplePoint& x) const {
  return grad_A_branch(dispatch_region(x, e_), x);
}

Vector3 BellmanModel::grad_A_branch(Region region, const TriplePoint& x) const {
  const auto g = a_branch(region).gradient(x.array());
  return {g[0], g[1], g[2]};
}

Matrix3 BellmanModel::hess_A(const TriplePoint& x, double margin) const {
  if (!hessian_safe(x, e_, margin)) {
    std::ostringstream os;
    os.precision(17);
    os << "Hessian requested within relative margin " << margin
       << " of a critical surface or coordinate plane at (" << x.u() << ", " << x.v() << ", "
       << x.w() << ")";
    throw BoundaryError(os.str());
  }
  return hess_A_branch(dispatch_region(x, e_), x);
}

Matrix3 BellmanModel::hess_A_branch(Region region, const TriplePoint& x) const {
  return to_matrix(a_branch(region).hessian(x.array()));
}

double BellmanModel::eval_gamma(const GammaPoint& g) const {
  return gamma_branch(dispatch_gamma_region(g)).value({g.t(), g.s()});
}

GammaJet BellmanModel::gamma_jet(Region region, const GammaPoint& g) const {
  const auto& branch = gamma_branch(region);
  const std::array<double, 2> ts{g.t(), g.s()};
  const auto d1 = branch.gradient(ts);
  const auto d2 = branch.hessian(ts);
  return {branch.value(ts), d1[0], d1[1], d2[0][0], d2[0][1], d2[1][1]};
}

void BellmanModel::require_domain(const BellmanPoint& x) const {
  if (!x.in_domain(e_)) throw DomainError("Bellman point outside the domain for these exponents");
}

double BellmanModel::linear_part(const BellmanPoint& x) const {
  return big_c_ * (x.big_u() / e_.p() + x.big_v() / e_.q() + x.big_w() / e_.r());
}

double BellmanModel::eval_B(const BellmanPoint& x) const {
  require_domain(x);
  return linear_part(x) - eval_A(x.triple());
}

Vector6 BellmanModel::grad_B(const BellmanPoint& x) const {
  require_domain(x);
  const Vector3 ga = grad_A(x.triple());
  Vector6 g;
  g << -ga[0], -ga[1], -ga[2], big_c_ / e_.p(), big_c_ / e_.q(), big_c_ / e_.r();
  return g;
}

Matrix6 BellmanModel::hess_B(const BellmanPoint& x, double margin) const {
  require_domain(x);
  Matrix6 h = Matrix6::Zero();
  h.topLeftCorner<3, 3>() = -hess_A(x.triple(), margin);
  return h;
}

double eval_A(const Coefficients& c, const Exponents& e, const TriplePoint& x) {
  return BellmanModel(c, e).eval_A(x);
}
double eval_gamma(const Coefficients& c, const Exponents& e, const GammaPoint& g) {
  return BellmanModel(c, e).eval_gamma(g);
}
Vector3 grad_A(const Coefficients& c, const Exponents& e, const TriplePoint& x) {
  return BellmanModel(c, e).grad_A(x);
}
Matrix3 hess_A(const Coefficients& c, const Exponents& e, const TriplePoint& x, double margin) {
  return BellmanModel(c, e).hess_A(x, margin);
}
double eval_B(const Coefficients& c, const Exponents& e, const BellmanPoint& x) {
  return BellmanModel(c, e).eval_B(x);
}
Vector6 grad_B(const Coefficients& c, const Exponents& e, const BellmanPoint& x) {
  return BellmanModel(c, e).grad_B(x);
}
Matrix6 hess_B(const Coefficients& c, const Exponents& e, const BellmanPoint& x, double margin) {
  return BellmanModel(c, e).hess_B(x, margin);
}

}  // namespace bellman
