#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "bellman/bellman_function.hpp"
#include "bellman/mollifier.hpp"

namespace bellman {

// (2 pi t)^{-1/2} exp(-x^2 / 2t). Throws DomainError unless t > 0.
double heat_kernel(double x, double t);
// d/dx of heat_kernel: -(x / t) k(x, t).
double heat_kernel_dx(double x, double t);
// Standard normal CDF.
double normal_cdf(double z);

// Bounded function with compact support, smooth between consecutive
// breakpoints. Support is [breaks.front(), breaks.back()].
struct PiecewiseFunction {
  std::function<double(double)> fn;
  std::vector<double> breaks;
};

// height on [center - half_width, center + half_width] times
// (1 - ((x - center) / half_width)^2)^power; power 0 is the indicator.
struct Bump {
  double center = 0.0;
  double half_width = 1.0;
  double height = 1.0;
  unsigned power = 2;
};

// Sum of bumps. Nonnegative by construction when all heights are >= 0.
class Profile {
 public:
  Profile() = default;
  // Throws DomainError on a non-positive half width or non-finite entries.
  explicit Profile(std::vector<Bump> bumps);
  static Profile indicator(double a, double b, double height = 1.0);

  double operator()(double x) const;
  const std::vector<Bump>& bumps() const noexcept { return bumps_; }
  std::vector<double> breaks() const;
  double support_radius() const;  // max |x| over the support
  bool smooth() const;            // every bump has power >= 1

  PiecewiseFunction function() const;
  // x -> |f(x)|^e with the same breakpoints.
  PiecewiseFunction power(double e) const;
  // (integral |f|^e)^{1/e} by adaptive quadrature.
  double lp_norm(double e) const;
  double sup_norm() const;
  // L2 norm of the derivative; infinite for an indicator piece.
  double derivative_l2() const;

 private:
  std::vector<Bump> bumps_;
};

struct Grid1D {
  double radius = 2.0;       // R
  double dx = 1.0 / 128.0;
  double delta = 0.05;
  double horizon = 2.0;      // T
  double dt = 1.0 / 32768.0; // dx^2 / 2

  // Throws ConstraintViolation unless R, dx, delta, dt > 0 and T > 2 delta.
  void validate() const;
  std::size_t nx() const;  // points -R, -R + dx, ..., R
  std::size_t nt() const;  // points delta, delta + dt, ..., <= T
  double x(std::size_t i) const;
  double t(std::size_t j) const;
};

struct HeatValue {
  double value = 0.0;
  double dx = 0.0;
  double error = 0.0;  // quadrature error estimate, summed over pieces
};

inline constexpr double kHeatQuadratureTolerance = 1e-11;

// u(x, t) and d/dx u(x, t) by adaptive Gauss-Kronrod quadrature over each
// smooth piece, restricted to |y - x| <= 12 sqrt(t). Throws QuadratureError
// if the error estimate exceeds 1e-9 times the L1 mass of both integrands.
HeatValue heat_value(const PiecewiseFunction& f, double x, double t);

// Field on every grid node, values[j][i] at (x_i, t_j).
struct HeatField {
  Grid1D grid;
  std::vector<std::vector<double>> value;
  std::vector<std::vector<double>> dx;
};

HeatField heat_extend(const PiecewiseFunction& f, const Grid1D& grid, unsigned threads = 1);

struct LambdaQuadrature {
  std::size_t time_intervals = 64;  // Simpson intervals in t (or in s = sqrt t)
};

struct HeatLambda {
  double value = 0.0;
  double time_tail_bound = 0.0;     // |contribution of t > T|
  double head_bound = 0.0;          // |contribution of t < delta|
  double spatial_tail_bound = 0.0;  // |contribution of |x| > R|
  bool truncation_warning = false;  // tails exceed 1e-3 |value|
  std::string warning;
};

// Integral over [-R, R] x [delta, T] of u v_x w_x (trapezoid in x, Simpson in t).
HeatLambda lambda_heat(const Profile& f, const Profile& g, const Profile& h, const Grid1D& grid,
                       const LambdaQuadrature& quad = {});
// Integral of (f * phi_s)(g * psi_s)(h * psi_s) ds / s over [-R, R] x
// [sqrt(delta), sqrt(T)], with phi_s = k(., s^2) and psi_s(x) = sqrt(2) (x / s) k(x, s^2)
// applied as separate convolutions (Simpson in s).
HeatLambda lambda_heat_bump(const Profile& f, const Profile& g, const Profile& h, const Grid1D& grid,
                            const LambdaQuadrature& quad = {});

// |Lambda| + tails <= C |f|_p |g|_q |h|_r.
struct HeatEstimate {
  double lambda_abs = 0.0;
  double tails = 0.0;
  double norm_product = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool ok() const { return margin >= 0.0; }
};
HeatEstimate verify_heat_estimate(const Coefficients& c, const Exponents& e, const Profile& f, const Profile& g,
                                  const Profile& h, const Grid1D& grid, const LambdaQuadrature& quad = {});

struct PdeConfig {
  std::size_t nx = 9;  // interior evaluation lattice
  std::size_t nt = 5;
  double eps = 0.0;    // 0: choose half the minimum field value over the window
  std::size_t nodes = 8;
  double c_grid = 1.0;
  bool fd_check = true;
};

struct PdePoint {
  double x = 0.0, t = 0.0;
  double lhs = 0.0;        // 1/2 (u_x, v_x, w_x) H_eps (u_x, v_x, w_x)'
  double rhs = 0.0;        // |u v_x w_x|
  double margin = 0.0;     // lhs - rhs
  double tolerance = 0.0;  // c_grid (dx^2 + dt) + 1e-9 scale
  double fd_operator = 0.0;      // finite-difference (d_t - 1/2 d_xx) b
  double fd_discrepancy = 0.0;   // |fd_operator - lhs|
};

struct PdeDefectReport {
  double eps = 0.0;
  std::vector<PdePoint> points;
  std::size_t violation_count = 0;
  double min_margin = 0.0;
  double max_fd_discrepancy = 0.0;
  bool passed() const { return violation_count == 0; }
};

// Smallest of u, v, w over the window [-R, R] x [delta, T - delta], scanned
// on the boundary and a coarse interior lattice.
double window_min_field(const Profile& f, const Profile& g, const Profile& h, const Grid1D& grid);

// Evaluates (d_t - 1/2 d_xx) b >= |u v_x w_x| for b = B_eps(u, v, w, U, V, W)
// at an nx x nt lattice inside [-R, R] x [delta, T - delta], where the left
// side is computed by the chain rule. Throws EpsilonError if some field is
// <= eps at a lattice point, BoundaryError if a finite-difference stencil
// leaves the window, DomainError if an input is negative somewhere.
PdeDefectReport pde_defect_check(const Coefficients& c, const Exponents& e, const Profile& f, const Profile& g,
                                 const Profile& h, const Grid1D& grid, const PdeConfig& config = {});

// Fixed battery of nonnegative bump triples used by tests and the CLI.
struct ProfileTriple {
  std::string name;
  Profile f, g, h;
};
std::vector<ProfileTriple> bump_battery();

}  // namespace bellman
