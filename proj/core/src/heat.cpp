#include "bellman/heat.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "bellman/errors.hpp"
#include "bellman/parallel.hpp"

namespace bellman {
namespace {

using GaussKronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr unsigned kMaxDepth = 18;
constexpr double kReach = 12.0;  // kernel support cut at 12 standard deviations

struct Integral {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// Integral of fn(y) kernel(x - y) over the support of fn within |y - x| <= reach.
Integral convolve(const PiecewiseFunction& f, const std::function<double(double)>& kernel, double x, double reach) {
  Integral total;
  const double lo = x - reach, hi = x + reach;
  for (std::size_t i = 0; i + 1 < f.breaks.size(); ++i) {
    const double a = std::max(f.breaks[i], lo), b = std::min(f.breaks[i + 1], hi);
    if (!(b > a)) continue;
    double err = 0.0, l1 = 0.0;
    const double v = GaussKronrod::integrate([&](double y) { return f.fn(y) * kernel(x - y); }, a, b, kMaxDepth,
                                             kHeatQuadratureTolerance, &err, &l1);
    total.value += v;
    total.error += err;
    total.l1 += l1;
  }
  return total;
}

double integrate_pieces(const PiecewiseFunction& f) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < f.breaks.size(); ++i) {
    total += GaussKronrod::integrate(f.fn, f.breaks[i], f.breaks[i + 1], kMaxDepth, kHeatQuadratureTolerance);
  }
  return total;
}

void check_error(const Integral& a, const Integral& b) {
  if (a.error + b.error > 1e-9 * (a.l1 + b.l1) + 1e-300) {
    throw QuadratureError("heat extension quadrature did not converge (error estimate " +
                          std::to_string(a.error + b.error) + ")");
  }
}

double bump_value(const Bump& b, double x) {
  const double z = (x - b.center) / b.half_width;
  if (std::abs(z) > 1.0) return 0.0;
  if (b.power == 0) return b.height;
  return b.height * std::pow(1.0 - z * z, static_cast<double>(b.power));
}

double bump_derivative(const Bump& b, double x) {
  const double z = (x - b.center) / b.half_width;
  if (std::abs(z) >= 1.0 || b.power == 0) return 0.0;
  return b.height * b.power * std::pow(1.0 - z * z, static_cast<double>(b.power) - 1.0) * (-2.0 * z / b.half_width);
}

// Composite Simpson on [a, b] with n (even) intervals.
template <typename Fn>
double simpson(Fn&& fn, double a, double b, std::size_t n) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / static_cast<double>(n);
  std::vector<double> terms(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    terms[i] = w * fn(a + h * static_cast<double>(i));
  }
  return pairwise_sum(terms) * h / 3.0;
}

// Trapezoid over the grid's x nodes.
template <typename Fn>
double trapezoid_x(Fn&& fn, const Grid1D& grid) {
  const std::size_t n = grid.nx();
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = (i == 0 || i + 1 == n ? 0.5 : 1.0) * fn(grid.x(i));
  return pairwise_sum(terms) * grid.dx;
}

void fill_tails(HeatLambda& out, const Profile& f, const Profile& g, const Profile& h, const Grid1D& grid) {
  const double f1 = f.lp_norm(1.0), g1 = g.lp_norm(1.0), h1 = h.lp_norm(1.0);
  const double root = std::sqrt(2.0 * std::numbers::pi * std::exp(1.0));
  out.time_tail_bound = f1 * g1 * h1 / (root * root * grid.horizon);
  out.head_bound = grid.delta * f.sup_norm() * g.derivative_l2() * h.derivative_l2();
  const double reach = grid.radius - std::max({f.support_radius(), g.support_radius(), h.support_radius()});
  if (reach <= 0.0) {
    out.spatial_tail_bound = std::numeric_limits<double>::infinity();
  } else {
    const double tail = simpson([&](double t) { return 2.0 * heat_kernel(reach, t) / (t * root); }, grid.delta,
                                grid.horizon, 400);
    out.spatial_tail_bound = f.sup_norm() * g1 * h1 * tail;
  }
  const double tails = out.time_tail_bound + out.head_bound + out.spatial_tail_bound;
  if (!(tails <= 1e-3 * std::abs(out.value))) {
    out.truncation_warning = true;
    out.warning = "truncated window: estimated tail " + std::to_string(tails) + " vs |Lambda| " +
                  std::to_string(std::abs(out.value));
  }
}

}  // namespace

double heat_kernel(double x, double t) {
  if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
  return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

double heat_kernel_dx(double x, double t) { return -(x / t) * heat_kernel(x, t); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

Profile::Profile(std::vector<Bump> bumps) : bumps_(std::move(bumps)) {
  for (const Bump& b : bumps_) {
    if (!(b.half_width > 0.0) || !std::isfinite(b.center) || !std::isfinite(b.height) ||
        !std::isfinite(b.half_width)) {
      throw DomainError("bump needs a positive half width and finite entries");
    }
  }
}

Profile Profile::indicator(double a, double b, double height) {
  if (!(b > a)) throw DomainError("indicator needs a < b");
  return Profile({{0.5 * (a + b), 0.5 * (b - a), height, 0}});
}

double Profile::operator()(double x) const {
  double s = 0.0;
  for (const Bump& b : bumps_) s += bump_value(b, x);
  return s;
}

std::vector<double> Profile::breaks() const {
  std::vector<double> out;
  for (const Bump& b : bumps_) {
    out.push_back(b.center - b.half_width);
    out.push_back(b.center + b.half_width);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Profile::support_radius() const {
  double r = 0.0;
  for (const Bump& b : bumps_) r = std::max({r, std::abs(b.center - b.half_width), std::abs(b.center + b.half_width)});
  return r;
}

bool Profile::smooth() const {
  return std::all_of(bumps_.begin(), bumps_.end(), [](const Bump& b) { return b.power >= 1; });
}

PiecewiseFunction Profile::function() const {
  return {[p = *this](double x) { return p(x); }, breaks()};
}

PiecewiseFunction Profile::power(double e) const {
  return {[p = *this, e](double x) { return std::pow(std::abs(p(x)), e); }, breaks()};
}

double Profile::lp_norm(double e) const { return std::pow(integrate_pieces(power(e)), 1.0 / e); }

double Profile::sup_norm() const {
  double m = 0.0;
  const std::vector<double> br = breaks();
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    for (int k = 0; k <= 256; ++k) m = std::max(m, std::abs((*this)(br[i] + (br[i + 1] - br[i]) * k / 256.0)));
  }
  return m;
}

double Profile::derivative_l2() const {
  if (!smooth()) return std::numeric_limits<double>::infinity();
  PiecewiseFunction d{[p = *this](double x) {
                        double s = 0.0;
                        for (const Bump& b : p.bumps()) s += bump_derivative(b, x);
                        return s * s;
                      },
                      breaks()};
  return std::sqrt(integrate_pieces(d));
}

void Grid1D::validate() const {
  if (!(radius > 0.0 && dx > 0.0 && delta > 0.0 && dt > 0.0)) {
    throw ConstraintViolation("grid needs R, dx, delta, dt > 0");
  }
  if (!(horizon > 2.0 * delta)) throw ConstraintViolation("grid needs T > 2 delta");
}

std::size_t Grid1D::nx() const { return static_cast<std::size_t>(std::llround(2.0 * radius / dx)) + 1; }
std::size_t Grid1D::nt() const {
  return static_cast<std::size_t>(std::floor((horizon - delta) / dt * (1.0 + 1e-12))) + 1;
}
double Grid1D::x(std::size_t i) const { return -radius + dx * static_cast<double>(i); }
double Grid1D::t(std::size_t j) const { return delta + dt * static_cast<double>(j); }

HeatValue heat_value(const PiecewiseFunction& f, double x, double t) {
  if (!(t > 0.0)) throw DomainError("heat extension needs t > 0");
  const double reach = kReach * std::sqrt(t);
  const Integral u = convolve(f, [t](double z) { return heat_kernel(z, t); }, x, reach);
  const Integral ux = convolve(f, [t](double z) { return heat_kernel_dx(z, t); }, x, reach);
  check_error(u, ux);
  return {u.value, ux.value, u.error + ux.error};
}

HeatField heat_extend(const PiecewiseFunction& f, const Grid1D& grid, unsigned threads) {
  grid.validate();
  HeatField out{grid, std::vector<std::vector<double>>(grid.nt()), std::vector<std::vector<double>>(grid.nt())};
  for_each_shard(grid.nt(), threads, [&](std::size_t j) {
    out.value[j].resize(grid.nx());
    out.dx[j].resize(grid.nx());
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const HeatValue hv = heat_value(f, grid.x(i), grid.t(j));
      out.value[j][i] = hv.value;
      out.dx[j][i] = hv.dx;
    }
  });
  return out;
}

HeatLambda lambda_heat(const Profile& f, const Profile& g, const Profile& h, const Grid1D& grid,
                       const LambdaQuadrature& quad) {
  grid.validate();
  const PiecewiseFunction pf = f.function(), pg = g.function(), ph = h.function();
  HeatLambda out;
  out.value = simpson(
      [&](double t) {
        return trapezoid_x(
            [&](double x) { return heat_value(pf, x, t).value * heat_value(pg, x, t).dx * heat_value(ph, x, t).dx; },
            grid);
      },
      grid.delta, grid.horizon, quad.time_intervals);
  fill_tails(out, f, g, h, grid);
  return out;
}

HeatLambda lambda_heat_bump(const Profile& f, const Profile& g, const Profile& h, const Grid1D& grid,
                            const LambdaQuadrature& quad) {
  grid.validate();
  const PiecewiseFunction pf = f.function(), pg = g.function(), ph = h.function();
  HeatLambda out;
  out.value = simpson(
      [&](double s) {
        const double t = s * s;
        const auto phi = [t](double z) { return heat_kernel(z, t); };
        const auto psi = [s, t](double z) { return std::numbers::sqrt2 * (z / s) * heat_kernel(z, t); };
        const double reach = kReach * s;
        return trapezoid_x(
                   [&](double x) {
                     const Integral a = convolve(pf, phi, x, reach), b = convolve(pg, psi, x, reach),
                                    c = convolve(ph, psi, x, reach);
                     check_error(a, b);
                     check_error(c, c);
                     return a.value * b.value * c.value;
                   },
                   grid) /
               s;
      },
      std::sqrt(grid.delta), std::sqrt(grid.horizon), quad.time_intervals);
  fill_tails(out, f, g, h, grid);
  return out;
}

HeatEstimate verify_heat_estimate(const Coefficients& c, const Exponents& e, const Profile& f, const Profile& g,
                                  const Profile& h, const Grid1D& grid, const LambdaQuadrature& quad) {
  const HeatLambda lam = lambda_heat(f, g, h, grid, quad);
  HeatEstimate r;
  r.lambda_abs = std::abs(lam.value);
  r.tails = lam.time_tail_bound + lam.head_bound + lam.spatial_tail_bound;
  r.norm_product = f.lp_norm(e.p()) * g.lp_norm(e.q()) * h.lp_norm(e.r());
  r.bound = c_constant(c, e) * r.norm_product;
  r.margin = r.bound - (r.lambda_abs + r.tails);
  return r;
}

double window_min_field(const Profile& f, const Profile& g, const Profile& h, const Grid1D& grid) {
  grid.validate();
  const PiecewiseFunction fs[3] = {f.function(), g.function(), h.function()};
  const double t_hi = grid.horizon - grid.delta;
  double m = std::numeric_limits<double>::infinity();
  constexpr int kSteps = 16;
  for (int a = 0; a <= kSteps; ++a) {
    for (int b = 0; b <= kSteps; ++b) {
      const double x = -grid.radius + 2.0 * grid.radius * a / kSteps;
      const double t = grid.delta + (t_hi - grid.delta) * b / kSteps;
      for (const auto& fn : fs) m = std::min(m, heat_value(fn, x, t).value);
    }
  }
  return m;
}

PdeDefectReport pde_defect_check(const Coefficients& c, const Exponents& e, const Profile& f, const Profile& g,
                                 const Profile& h, const Grid1D& grid, const PdeConfig& cfg) {
  grid.validate();
  for (const Profile* p : {&f, &g, &h}) {
    for (const Bump& b : p->bumps()) {
      if (b.height < 0.0) throw DomainError("heat defect check needs nonnegative inputs");
    }
  }
  const BellmanModel model(c, e);
  PdeDefectReport rep;
  rep.eps = cfg.eps > 0.0 ? cfg.eps : 0.5 * window_min_field(f, g, h, grid);
  if (!(rep.eps > 0.0)) throw EpsilonError("fields vanish in the window; no admissible eps");
  const Mollifier moll(rep.eps, cfg.nodes);
  const PiecewiseFunction base[3] = {f.function(), g.function(), h.function()};
  const PiecewiseFunction powers[3] = {f.power(e.p()), g.power(e.q()), h.power(e.r())};
  const double t_hi = grid.horizon - grid.delta;

  struct Fields {
    HeatValue u[3], big[3];
  };
  auto fields = [&](double x, double t) {
    Fields fl;
    for (int k = 0; k < 3; ++k) {
      fl.u[k] = heat_value(base[k], x, t);
      fl.big[k] = heat_value(powers[k], x, t);
    }
    if (std::min({fl.u[0].value, fl.u[1].value, fl.u[2].value}) <= rep.eps) {
      throw EpsilonError("field value <= eps at x = " + std::to_string(x) + ", t = " + std::to_string(t));
    }
    return fl;
  };
  auto b_value = [&](const Fields& fl) {
    const double lin = model.c_constant() * (fl.big[0].value / e.p() + fl.big[1].value / e.q() + fl.big[2].value / e.r());
    return lin - moll.value(model, {fl.u[0].value, fl.u[1].value, fl.u[2].value});
  };

  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < cfg.nx; ++a) {
    for (std::size_t b = 0; b < cfg.nt; ++b) {
      PdePoint pt;
      pt.x = -grid.radius + 2.0 * grid.radius * static_cast<double>(a + 1) / static_cast<double>(cfg.nx + 1);
      pt.t = grid.delta + (t_hi - grid.delta) * static_cast<double>(b + 1) / static_cast<double>(cfg.nt + 1);
      const Fields fl = fields(pt.x, pt.t);
      const TriplePoint x3(fl.u[0].value, fl.u[1].value, fl.u[2].value);
      const Matrix3 hm = moll.hessian(model, x3);
      const Vector3 d(fl.u[0].dx, fl.u[1].dx, fl.u[2].dx);
      pt.lhs = 0.5 * d.dot(hm * d);
      pt.rhs = std::abs(fl.u[0].value * fl.u[1].dx * fl.u[2].dx);
      pt.margin = pt.lhs - pt.rhs;
      const double scale = 1.0 + 0.5 * (hm.cwiseAbs() * d.cwiseAbs()).dot(d.cwiseAbs()) + pt.rhs;
      pt.tolerance = cfg.c_grid * (grid.dx * grid.dx + grid.dt) + 1e-9 * scale;
      if (pt.margin < -pt.tolerance) ++rep.violation_count;
      rep.min_margin = std::min(rep.min_margin, pt.margin / scale);

      if (cfg.fd_check) {
        if (pt.x - grid.dx < -grid.radius || pt.x + grid.dx > grid.radius || pt.t - grid.dt < grid.delta ||
            pt.t + grid.dt > t_hi) {
          throw BoundaryError("finite-difference stencil leaves the window");
        }
        const double b0 = b_value(fl);
        const double bt_plus = b_value(fields(pt.x, pt.t + grid.dt)), bt_minus = b_value(fields(pt.x, pt.t - grid.dt));
        const double bx_plus = b_value(fields(pt.x + grid.dx, pt.t)), bx_minus = b_value(fields(pt.x - grid.dx, pt.t));
        pt.fd_operator = (bt_plus - bt_minus) / (2.0 * grid.dt) -
                         0.5 * (bx_plus - 2.0 * b0 + bx_minus) / (grid.dx * grid.dx);
        pt.fd_discrepancy = std::abs(pt.fd_operator - pt.lhs);
        rep.max_fd_discrepancy = std::max(rep.max_fd_discrepancy, pt.fd_discrepancy);
      }
      rep.points.push_back(pt);
    }
  }
  return rep;
}

std::vector<ProfileTriple> bump_battery() {
  auto P = [](std::vector<Bump> b) { return Profile(std::move(b)); };
  std::vector<ProfileTriple> out;
  out.push_back({"centered", P({{0.0, 1.0, 1.0, 2}}), P({{0.0, 1.0, 1.0, 2}}), P({{0.0, 1.0, 1.0, 2}})});
  out.push_back({"shifted g", P({{0.0, 1.0, 1.0, 2}}), P({{0.3, 0.7, 2.0, 3}}), P({{-0.2, 0.8, 1.0, 2}})});
  out.push_back({"tall f", P({{0.0, 0.5, 5.0, 2}}), P({{0.0, 1.0, 1.0, 2}}), P({{0.1, 0.9, 1.0, 4}})});
  out.push_back({"two-bump g", P({{0.0, 1.0, 1.0, 2}}), P({{-0.5, 0.4, 1.0, 2}, {0.5, 0.4, 2.0, 2}}),
                 P({{0.0, 1.0, 1.0, 3}})});
  out.push_back({"two-bump h", P({{0.2, 0.8, 1.0, 2}}), P({{0.0, 1.0, 1.5, 2}}),
                 P({{-0.4, 0.5, 1.0, 2}, {0.4, 0.5, 0.5, 3}})});
  out.push_back({"narrow g h", P({{0.0, 1.0, 1.0, 2}}), P({{0.1, 0.3, 1.0, 2}}), P({{-0.1, 0.3, 1.0, 2}})});
  out.push_back({"wide f", P({{0.0, 1.0, 0.2, 1}}), P({{0.2, 0.6, 3.0, 2}}), P({{0.0, 0.9, 2.0, 2}})});
  out.push_back({"opposed", P({{-0.3, 0.6, 1.0, 2}}), P({{0.3, 0.6, 1.0, 2}}), P({{0.0, 1.0, 1.0, 2}})});
  out.push_back({"three-bump f", P({{-0.6, 0.3, 1.0, 2}, {0.0, 0.3, 2.0, 2}, {0.6, 0.3, 1.0, 2}}),
                 P({{0.0, 1.0, 1.0, 2}}), P({{0.0, 0.7, 1.0, 2}})});
  out.push_back({"high powers", P({{0.0, 1.0, 1.0, 4}}), P({{0.1, 0.9, 1.0, 5}}), P({{-0.1, 0.9, 1.0, 6}})});
  out.push_back({"small amplitude", P({{0.0, 1.0, 0.01, 2}}), P({{0.0, 1.0, 0.02, 2}}), P({{0.2, 0.8, 0.05, 2}})});
  out.push_back({"large amplitude", P({{0.0, 1.0, 50.0, 2}}), P({{-0.2, 0.8, 20.0, 3}}), P({{0.3, 0.7, 10.0, 2}})});
  return out;
}

}  // namespace bellman
