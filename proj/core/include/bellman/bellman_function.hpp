#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

#include "bellman/exponents.hpp"
#include "bellman/power_sum.hpp"

namespace bellman {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

// (u, v, w) in the closed octant [0, inf)^3.
class TriplePoint {
 public:
  // Throws DomainError for negative or non-finite coordinates.
  TriplePoint(double u, double v, double w);

  double u() const noexcept { return u_; }
  double v() const noexcept { return v_; }
  double w() const noexcept { return w_; }
  std::array<double, 3> array() const noexcept { return {u_, v_, w_}; }
  Vector3 vector() const { return {u_, v_, w_}; }

 private:
  double u_, v_, w_;
};

// (u, v, w, U, V, W) with u^p <= U, v^q <= V, w^r <= W.
class BellmanPoint {
 public:
  // Throws DomainError if the point is outside the domain for `e`.
  BellmanPoint(const Exponents& e, double u, double v, double w, double big_u, double big_v,
               double big_w);

  double u() const noexcept { return x_[0]; }
  double v() const noexcept { return x_[1]; }
  double w() const noexcept { return x_[2]; }
  double big_u() const noexcept { return x_[3]; }
  double big_v() const noexcept { return x_[4]; }
  double big_w() const noexcept { return x_[5]; }
  TriplePoint triple() const { return {x_[0], x_[1], x_[2]}; }
  const std::array<double, 6>& array() const noexcept { return x_; }

  bool in_domain(const Exponents& e) const;

 private:
  std::array<double, 6> x_;
};

// The six open regions cut out by u^p = v^q, u^p = w^r, v^q = w^r.
//   R1: u^p < w^r < v^q    R2: w^r < u^p < v^q    R3: w^r < v^q < u^p
//   R4: v^q < w^r < u^p    R5: v^q < u^p < w^r    R6: u^p < v^q < w^r
enum class Region { R1 = 1, R2, R3, R4, R5, R6, Boundary };

std::string_view to_string(Region region);
inline constexpr std::array<Region, 6> kOpenRegions{Region::R1, Region::R2, Region::R3,
                                                    Region::R4, Region::R5, Region::R6};

// (t, s) = (v^q / u^p, w^r / u^p), both strictly positive.
class GammaPoint {
 public:
  GammaPoint(double t, double s);
  double t() const noexcept { return t_; }
  double s() const noexcept { return s_; }

 private:
  double t_, s_;
};

inline constexpr double kDispatchTolerance = 1e-12;
inline constexpr double kDefaultHessianMargin = 1e-6;

// Strict classification: Rk when the defining chain holds with every relative
// gap larger than `tol`, Boundary otherwise. Throws DomainError on a
// coordinate plane.
Region classify_region(const TriplePoint& x, const Exponents& e, double tol = kDispatchTolerance);
Region classify_gamma_region(const GammaPoint& g, double tol = kDispatchTolerance);

// Branch used for evaluation: the first of R1..R6 whose non-strict chain
// holds. Total on the closed octant, never returns Boundary.
Region dispatch_region(const TriplePoint& x, const Exponents& e);
Region dispatch_gamma_region(const GammaPoint& g);

// Value, first and second derivatives of gamma on one branch.
struct GammaJet {
  double value = 0.0;
  double dt = 0.0;
  double ds = 0.0;
  double dtt = 0.0;
  double dts = 0.0;
  double dss = 0.0;
};

// Explicit Bellman function for fixed coefficients and exponents. The six
// branch formulas of A and of gamma are tabulated once at construction; all
// member functions are const and thread-safe.
class BellmanModel {
 public:
  BellmanModel(const Coefficients& c, const Exponents& e);

  const Coefficients& coefficients() const noexcept { return c_; }
  const Exponents& exponents() const noexcept { return e_; }
  double c_constant() const noexcept { return big_c_; }

  double eval_A(const TriplePoint& x) const;
  double eval_A_branch(Region region, const TriplePoint& x) const;
  Vector3 grad_A(const TriplePoint& x) const;
  Vector3 grad_A_branch(Region region, const TriplePoint& x) const;
  // Throws BoundaryError unless x is at relative distance > margin from every
  // critical surface and coordinate plane.
  Matrix3 hess_A(const TriplePoint& x, double margin = kDefaultHessianMargin) const;
  // Second derivatives of one branch's formula, no margin check.
  Matrix3 hess_A_branch(Region region, const TriplePoint& x) const;

  double eval_gamma(const GammaPoint& g) const;
  GammaJet gamma_jet(Region region, const GammaPoint& g) const;

  double eval_B(const BellmanPoint& x) const;
  Vector6 grad_B(const BellmanPoint& x) const;
  Matrix6 hess_B(const BellmanPoint& x, double margin = kDefaultHessianMargin) const;

  // C (U/p + V/q + W/r), the linear part of B.
  double linear_part(const BellmanPoint& x) const;

 private:
  const PowerSum<3>& a_branch(Region region) const;
  const PowerSum<2>& gamma_branch(Region region) const;
  void require_domain(const BellmanPoint& x) const;

  Coefficients c_;
  Exponents e_;
  double big_c_;
  std::array<PowerSum<3>, 6> a_branches_;
  std::array<PowerSum<2>, 6> gamma_branches_;
};

// Free-function forms of the model operations.
double eval_A(const Coefficients& c, const Exponents& e, const TriplePoint& x);
double eval_gamma(const Coefficients& c, const Exponents& e, const GammaPoint& g);
Vector3 grad_A(const Coefficients& c, const Exponents& e, const TriplePoint& x);
Matrix3 hess_A(const Coefficients& c, const Exponents& e, const TriplePoint& x,
               double margin = kDefaultHessianMargin);
double eval_B(const Coefficients& c, const Exponents& e, const BellmanPoint& x);
Vector6 grad_B(const Coefficients& c, const Exponents& e, const BellmanPoint& x);
Matrix6 hess_B(const Coefficients& c, const Exponents& e, const BellmanPoint& x,
               double margin = kDefaultHessianMargin);

// True when x is far enough from surfaces and planes for hess_A.
bool hessian_safe(const TriplePoint& x, const Exponents& e, double margin);

}  // namespace bellman
