#include "bellman_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "bellman/coeff_search.hpp"
#include "bellman/dyadic.hpp"
#include "bellman/errors.hpp"
#include "bellman/heat.hpp"
#include "bellman/io.hpp"
#include "bellman/martingale.hpp"
#include "bellman/psd.hpp"

namespace bellman::cli {
namespace {

std::size_t samples_or_default(const RunConfig& cfg) {
  return cfg.samples ? cfg.samples : default_samples(cfg.command);
}

Report start(const RunConfig& cfg) {
  Report rep;
  rep.config = cfg;
  return rep;
}

std::string sign_suffix(Sign s) { return s == Sign::Plus ? "+" : "-"; }

// Brownian checks: X = Y = B on a dyadic family of partitions, compared with
// (B_T^2 - T) / 2 path by path.
void add_brownian_checks(Report& rep, const RunConfig& cfg) {
  BrownianGrid grid;
  grid.paths = cfg.paths;
  grid.seed = cfg.seed;
  const double horizon = grid.horizon;
  const RiemannReport rr =
      brownian_riemann_approx(MartingaleGenerator::brownian(), MartingaleGenerator::brownian(), grid, 5, 2.0,
                              [horizon](double b) { return 0.5 * (b * b - horizon); }, cfg.threads);

  Check mean{"Brownian Riemann sums: mean error"};
  Check var{"Brownian Riemann sums: error variance"};
  mean.tol = var.tol = 3.0;
  mean.samples = var.samples = grid.paths;
  mean.coordinate_names = var.coordinate_names = "steps";
  mean.value_names = "mean;stderr";
  var.value_names = "variance;expected;stderr";
  Json levels = Json::array();
  for (const RiemannLevel& lv : rr.levels) {
    const double m = static_cast<double>(lv.steps);
    const double expected = horizon * horizon / (2.0 * m);
    const double mean_sigmas = std::abs(lv.ref_mean) / lv.ref_mean_stderr;
    const double var_sigmas = std::abs(lv.ref_variance - expected) / lv.ref_variance_stderr;
    if (mean_sigmas >= 3.0) {
      ++mean.violations;
      mean.witnesses.push_back({{m}, {lv.ref_mean, lv.ref_mean_stderr}});
    }
    if (var_sigmas >= 3.0) {
      ++var.violations;
      var.witnesses.push_back({{m}, {lv.ref_variance, expected, lv.ref_variance_stderr}});
    }
    Json lj;
    lj["steps"] = lv.steps;
    lj["sum_mean"] = lv.mean;
    lj["sum_variance"] = lv.variance;
    lj["error_mean"] = lv.ref_mean;
    lj["error_mean_stderr"] = lv.ref_mean_stderr;
    lj["error_mean_sigmas"] = mean_sigmas;
    lj["error_variance"] = lv.ref_variance;
    lj["error_variance_expected"] = expected;
    lj["error_variance_sigmas"] = var_sigmas;
    levels.push_back(std::move(lj));
  }
  mean.passed = mean.violations == 0;
  var.passed = var.violations == 0;
  mean.metrics["levels"] = levels;
  var.metrics["increment_mean"] = rr.increment_mean;
  var.metrics["increment_stderr"] = rr.increment_stderr;
  rep.checks.push_back(std::move(mean));
  rep.checks.push_back(std::move(var));
}

Grid1D pde_grid(double dx) {
  Grid1D g;
  g.radius = 1.5;
  g.dx = dx;
  g.dt = dx * dx / 2.0;
  g.delta = 0.05;
  g.horizon = 2.0;
  return g;
}

Grid1D lambda_grid(double dx) {
  Grid1D g;
  g.radius = 3.0;
  g.dx = dx;
  g.delta = 0.05;
  g.horizon = 4.0;
  return g;
}

Check indicator_check() {
  constexpr double a = -0.5, b = 1.0;
  constexpr double kRel = 1e-8, kAbs = 1e-30;  // kAbs: mass beyond the 12-sigma cut
  const PiecewiseFunction f = Profile::indicator(a, b).function();
  Check ch{"heat extension of an indicator vs normal CDF"};
  ch.tol = kRel;
  ch.coordinate_names = "x;t";
  ch.value_names = "quadrature;closed_form;dx_quadrature;dx_closed_form";
  double worst_rel = 0.0;
  for (int i = -12; i <= 12; ++i) {
    for (double t : {0.01, 0.1, 0.5, 1.0, 3.0}) {
      const double x = 0.25 * i;
      const double za = (a - x) / std::sqrt(t), zb = (b - x) / std::sqrt(t);
      // Upper-tail form when both arguments are positive avoids cancellation.
      const double exact = za > 0.0 ? normal_cdf(-za) - normal_cdf(-zb) : normal_cdf(zb) - normal_cdf(za);
      const double exact_dx = heat_kernel(x - a, t) - heat_kernel(x - b, t);
      const HeatValue hv = heat_value(f, x, t);
      ++ch.samples;
      const double err = std::abs(hv.value - exact), err_dx = std::abs(hv.dx - exact_dx);
      if (exact > 1e-25) worst_rel = std::max(worst_rel, err / exact);
      if (err > kRel * exact + kAbs || err_dx > kRel * std::abs(exact_dx) + kAbs) {
        ++ch.violations;
        ch.witnesses.push_back({{x, t}, {hv.value, exact, hv.dx, exact_dx}});
      }
    }
  }
  ch.passed = ch.violations == 0;
  ch.metrics["max_relative_error"] = worst_rel;
  ch.metrics["absolute_floor"] = kAbs;
  return ch;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"eval",           "verify-psd", "verify-properties", "dyadic-test",
                                              "martingale-sim", "heat-test",  "search-coeffs"};
  return names;
}

namespace {

std::string describe(const std::string& command) {
  if (command == "eval") return "evaluate A (and B) at a point";
  if (command == "verify-psd") return "scan the reduced Hessian matrices of all regions and signs";
  if (command == "verify-properties") return "randomized checks of the Bellman function properties";
  if (command == "dyadic-test") return "dyadic paraproduct identities and estimates";
  if (command == "martingale-sim") return "tree martingales and Brownian Riemann sums";
  if (command == "heat-test") return "heat extensions, heat paraproduct and the PDE inequality";
  return "search for smaller feasible coefficients";
}

}  // namespace

std::size_t default_samples(const std::string& command) {
  if (command == "verify-psd" || command == "verify-properties") return 100000;
  if (command == "dyadic-test" || command == "martingale-sim") return 10000;
  if (command == "search-coeffs") return 4000;
  return 0;
}

Report run_eval(const RunConfig& cfg) {
  const Exponents e = cfg.exponents();
  const Coefficients c = cfg.coefficients();
  Report rep = start(cfg);
  const auto& pt = cfg.point;
  if (pt.size() != 3 && pt.size() != 6) throw ConstraintViolation("--point needs 3 (u,v,w) or 6 (u,v,w,U,V,W) values");
  const TriplePoint x(pt[0], pt[1], pt[2]);
  rep.result["A"] = eval_A(c, e, x);
  rep.result["region"] = std::string(to_string(classify_region(x, e)));
  rep.result["branch"] = std::string(to_string(dispatch_region(x, e)));
  const Vector3 g = grad_A(c, e, x);
  rep.result["grad_A"] = std::vector<double>{g[0], g[1], g[2]};
  if (pt.size() == 6) {
    const BellmanPoint bx(e, pt[0], pt[1], pt[2], pt[3], pt[4], pt[5]);
    rep.result["B"] = eval_B(c, e, bx);
  }
  rep.result["C_constant"] = c_constant(c, e);
  return rep;
}

Report run_verify_psd(const RunConfig& cfg) {
  const Exponents e = cfg.exponents();
  const Coefficients c = cfg.coefficients();
  Report rep = start(cfg);
  ScanConfig sc;
  sc.samples_per_region = samples_or_default(cfg);
  sc.seed = cfg.seed;
  sc.threads = cfg.threads;
  sc.max_witnesses = 100;
  const std::vector<ScanReport> reports = scan_regions(c, e, sc);
  double overall = std::numeric_limits<double>::infinity();
  for (const ScanReport& r : reports) {
    Check ch;
    ch.name = std::string(to_string(r.region)) + sign_suffix(r.sign);
    ch.samples = r.samples;
    ch.violations = r.violation_count;
    ch.passed = r.violation_count == 0;
    ch.tol = sc.tol.rel;
    ch.metrics["min_scaled_minor"] = r.min_minor_scaled;
    ch.metrics["at_t"] = r.min_t;
    ch.metrics["at_s"] = r.min_s;
    ch.metrics["minor_eigenvalue_disagreements"] = r.disagreement_count;
    ch.coordinate_names = "t;s";
    ch.value_names = "m1_scaled;m2_scaled;m3_scaled;lambda_min";
    for (const ScanViolation& v : r.violations) {
      ch.witnesses.push_back({{v.t, v.s}, {v.verdict.scaled.m1, v.verdict.scaled.m2, v.verdict.scaled.m3,
                                           v.verdict.lambda_min}});
    }
    overall = std::min(overall, r.min_minor_scaled);
    rep.checks.push_back(std::move(ch));
  }
  rep.result["min_scaled_minor"] = overall;
  rep.result["C_constant"] = c_constant(c, e);
  return rep;
}

Report run_verify_properties(const RunConfig& cfg) {
  PropertyConfig pc;
  pc.samples = samples_or_default(cfg);
  pc.seed = cfg.seed;
  pc.tol = cfg.tol;
  pc.threads = cfg.threads;
  Report rep = start(cfg);
  for (const PropertyResult& r : run_suite(cfg.coefficients(), cfg.exponents(), pc)) {
    rep.checks.push_back(from_property(r, "instance"));
  }
  return rep;
}

Report run_dyadic_test(const RunConfig& cfg) {
  DyadicSuiteConfig dc;
  dc.samples = samples_or_default(cfg);
  dc.abstract_samples = std::min<std::size_t>(dc.samples, 1000);
  dc.seed = cfg.seed;
  dc.tol = cfg.tol;
  dc.threads = cfg.threads;
  Report rep = start(cfg);
  for (const PropertyResult& r : run_dyadic_suite(cfg.coefficients(), cfg.exponents(), dc)) {
    rep.checks.push_back(from_property(r, "instance"));
  }
  return rep;
}

Report run_martingale_sim(const RunConfig& cfg) {
  MartingaleSuiteConfig mc;
  mc.samples = samples_or_default(cfg);
  mc.seed = cfg.seed;
  mc.tol = cfg.tol;
  mc.threads = cfg.threads;
  Report rep = start(cfg);
  for (const PropertyResult& r : run_martingale_suite(cfg.coefficients(), cfg.exponents(), mc)) {
    rep.checks.push_back(from_property(r, "instance"));
  }
  add_brownian_checks(rep, cfg);
  return rep;
}

Report run_heat_test(const RunConfig& cfg) {
  const Exponents e = cfg.exponents();
  const Coefficients c = cfg.coefficients();
  Report rep = start(cfg);
  rep.checks.push_back(indicator_check());
  const std::vector<ProfileTriple> battery = bump_battery();

  Check lam{"heat paraproduct: kernel form vs bump form under refinement"};
  lam.tol = 1e-3;
  lam.coordinate_names = "triple;level";
  lam.value_names = "kernel_form;bump_form;relative_difference";
  Json lam_levels = Json::array();
  for (std::size_t k = 0; k < 3; ++k) {
    const ProfileTriple& tr = battery[k];
    double rel = 0.0;
    for (std::size_t lev = 0; lev < 3; ++lev) {
      const Grid1D g = lambda_grid(1.0 / static_cast<double>(32u << lev));
      const LambdaQuadrature quad{std::size_t{64} << lev};
      const HeatLambda a = lambda_heat(tr.f, tr.g, tr.h, g, quad);
      const HeatLambda b = lambda_heat_bump(tr.f, tr.g, tr.h, g, quad);
      rel = std::abs(a.value - b.value) / std::max(std::abs(a.value), std::abs(b.value));
      Json lj;
      lj["triple"] = tr.name;
      lj["dx"] = g.dx;
      lj["time_intervals"] = quad.time_intervals;
      lj["kernel_form"] = a.value;
      lj["bump_form"] = b.value;
      lj["relative_difference"] = rel;
      lj["tail_bound"] = a.time_tail_bound + a.head_bound + a.spatial_tail_bound;
      lam_levels.push_back(std::move(lj));
      if (lev == 2 && rel > lam.tol) {
        ++lam.violations;
        lam.witnesses.push_back({{static_cast<double>(k), static_cast<double>(lev)}, {a.value, b.value, rel}});
      }
    }
    ++lam.samples;
  }
  lam.passed = lam.violations == 0;
  lam.metrics["levels"] = lam_levels;
  rep.checks.push_back(std::move(lam));

  const Grid1D coarse = pde_grid(1.0 / 32.0), fine = pde_grid(1.0 / 64.0);
  Check fd{"finite-difference operator converges to the chain-rule operator"};
  fd.tol = 3.0;  // minimum error ratio per halving of dx (second order gives 4)
  fd.coordinate_names = "triple";
  fd.value_names = "coarse_discrepancy;fine_discrepancy";
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < battery.size(); ++k) {
    const ProfileTriple& tr = battery[k];
    const PdeDefectReport r = pde_defect_check(c, e, tr.f, tr.g, tr.h, fine);
    Check ch{"PDE defect: " + tr.name};
    ch.samples = r.points.size();
    ch.violations = r.violation_count;
    ch.passed = r.passed();
    ch.tol = fine.dx * fine.dx + fine.dt;
    ch.metrics["eps"] = r.eps;
    ch.metrics["min_relative_margin"] = r.min_margin;
    ch.metrics["max_fd_discrepancy"] = r.max_fd_discrepancy;
    ch.coordinate_names = "x;t";
    ch.value_names = "lhs;rhs;tolerance";
    for (const PdePoint& p : r.points) {
      if (p.margin < -p.tolerance) ch.witnesses.push_back({{p.x, p.t}, {p.lhs, p.rhs, p.tolerance}});
    }
    rep.checks.push_back(std::move(ch));

    PdeConfig pc;
    pc.eps = r.eps;
    const PdeDefectReport rc = pde_defect_check(c, e, tr.f, tr.g, tr.h, coarse, pc);
    const double ratio = rc.max_fd_discrepancy / r.max_fd_discrepancy;
    min_ratio = std::min(min_ratio, ratio);
    ++fd.samples;
    if (!(ratio >= fd.tol)) {
      ++fd.violations;
      fd.witnesses.push_back({{static_cast<double>(k)}, {rc.max_fd_discrepancy, r.max_fd_discrepancy}});
    }
  }
  fd.passed = fd.violations == 0;
  fd.metrics["min_ratio"] = min_ratio;
  rep.checks.push_back(std::move(fd));

  Check est{"heat paraproduct estimate with tail bounds"};
  est.tol = 0.0;
  est.coordinate_names = "triple";
  est.value_names = "lambda_abs;tails;bound";
  const Grid1D eg = lambda_grid(1.0 / 32.0);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < battery.size(); ++k) {
    const ProfileTriple& tr = battery[k];
    const HeatEstimate he = verify_heat_estimate(c, e, tr.f, tr.g, tr.h, eg);
    ++est.samples;
    worst = std::min(worst, he.margin / he.bound);
    if (!he.ok()) {
      ++est.violations;
      est.witnesses.push_back({{static_cast<double>(k)}, {he.lambda_abs, he.tails, he.bound}});
    }
  }
  est.passed = est.violations == 0;
  est.metrics["min_relative_margin"] = worst;
  rep.checks.push_back(std::move(est));
  return rep;
}

Report run_search_coeffs(const RunConfig& cfg) {
  const Exponents e = cfg.exponents();
  FeasibilitySpec spec;
  spec.samples_per_region = samples_or_default(cfg);
  spec.seed = cfg.seed;
  spec.threads = cfg.threads;
  const SearchReport sr = search_coefficients(e, spec, cfg.budget);
  Report rep = start(cfg);
  rep.result["A"] = sr.coefficients.a();
  rep.result["B"] = sr.coefficients.b();
  rep.result["C"] = sr.coefficients.c();
  rep.result["C_constant"] = sr.constant;
  rep.result["default_C_constant"] = sr.default_constant;
  rep.result["label"] = sr.label;
  rep.result["samples_per_region"] = spec.samples_per_region;
  rep.result["evaluations"] = sr.evaluations;
  rep.result["validation_seed"] = sr.validation_seed;
  rep.result["expansions"] = sr.expansions;
  rep.result["fell_back_to_defaults"] = sr.fell_back_to_defaults;
  Json trace = Json::array();
  for (const SearchStep& s : sr.trace) trace.push_back(Json{{"A", s.a}, {"C", s.c}, {"feasible", s.feasible}});
  rep.result["trace"] = trace;

  Check ch{"search result: validated and no worse than the defaults"};
  ch.samples = spec.samples_per_region;
  ch.violations = sr.validation.violations;
  ch.passed = sr.validation.feasible && sr.constant <= sr.default_constant;
  ch.metrics["validation_feasible"] = sr.validation.feasible;
  ch.metrics["C_constant"] = sr.constant;
  rep.checks.push_back(std::move(ch));
  return rep;
}

Report run_command(const RunConfig& cfg) {
  cfg.validate();
  const std::string& c = cfg.command;
  if (c == "eval") return run_eval(cfg);
  if (c == "verify-psd") return run_verify_psd(cfg);
  if (c == "verify-properties") return run_verify_properties(cfg);
  if (c == "dyadic-test") return run_dyadic_test(cfg);
  if (c == "martingale-sim") return run_martingale_sim(cfg);
  if (c == "heat-test") return run_heat_test(cfg);
  if (c == "search-coeffs") return run_search_coeffs(cfg);
  throw ConstraintViolation("unknown command '" + c + "'");
}

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for an explicit trilinear Bellman function", kToolName};
  app.require_subcommand(1);

  struct Flags {
    double p = 2, q = 6, r = 3, a = 0, b = 0, c = 0, tol = kMarginTolerance;
    std::uint64_t seed = 7;
    std::size_t samples = 0, budget = 40, paths = 100000;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string out, config, point;
    bool timing = false;
  } f;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  std::vector<std::pair<std::string, CLI::Option*>> given;
  for (const std::string& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    auto opt = [&](const std::string& flag, auto& dst, const std::string& help) {
      given.emplace_back(name + flag, sub->add_option(flag, dst, help));
    };
    opt("--p", f.p, "exponent p");
    opt("--q", f.q, "exponent q");
    opt("--r", f.r, "exponent r");
    opt("--A", f.a, "coefficient A (default: closed-form choice)");
    opt("--B", f.b, "coefficient B");
    opt("--C", f.c, "coefficient C");
    opt("--seed", f.seed, "base seed");
    opt("--samples", f.samples, "sample count (0: subcommand default)");
    opt("--budget", f.budget, "feasibility evaluations for search-coeffs");
    opt("--paths", f.paths, "Brownian paths for martingale-sim");
    opt("--tol", f.tol, "relative margin tolerance");
    opt("--threads", f.threads, "worker threads (results do not depend on it)");
    opt("--point", f.point, "comma-separated u,v,w or u,v,w,U,V,W for eval");
    opt("--out", f.out, "JSON report path; witnesses go to <stem>.witnesses.csv");
    opt("--config", f.config, "JSON config or earlier report to replay");
    given.emplace_back(name + "--timing", sub->add_flag("--timing", f.timing, "record wall time in the report"));
    subs.emplace_back(name, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }
  auto is_given = [&](const std::string& flag) {
    for (const auto& [key, o] : given) {
      if (key == command + flag) return o->count() > 0;
    }
    return false;
  };

  Report report;
  try {
    RunConfig cfg;
    if (is_given("--config")) cfg = RunConfig::from_json(Json::parse(read_text_file(f.config)));
    cfg.command = command;
    if (is_given("--p")) cfg.p = f.p;
    if (is_given("--q")) cfg.q = f.q;
    if (is_given("--r")) cfg.r = f.r;
    if (is_given("--A")) cfg.a = f.a;
    if (is_given("--B")) cfg.b = f.b;
    if (is_given("--C")) cfg.c = f.c;
    if (is_given("--seed")) cfg.seed = f.seed;
    if (is_given("--samples")) cfg.samples = f.samples;
    if (is_given("--budget")) cfg.budget = f.budget;
    if (is_given("--paths")) cfg.paths = f.paths;
    if (is_given("--tol")) cfg.tol = f.tol;
    if (is_given("--point")) {
      cfg.point.clear();
      std::stringstream ss(f.point);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          std::size_t used = 0;
          cfg.point.push_back(std::stod(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
          throw ConstraintViolation("--point entry '" + item + "' is not a number");
        }
      }
    }
    cfg.out = f.out;
    cfg.threads = f.threads;
    cfg.timing = f.timing;
    if (cfg.command == "eval" && cfg.point.empty()) throw ConstraintViolation("eval needs --point");
    cfg.validate();

    const auto t0 = std::chrono::steady_clock::now();
    report = run_command(cfg);
    if (cfg.timing) report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } catch (const Json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const ConstraintViolation& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const IOError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SearchFailure& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: run failed: " << e.what() << "\n";
    return 1;
  }

  if (command == "eval") {
    out << "A = " << format_double(report.result["A"].get<double>()) << "\n";
    out << "region = " << report.result["region"].get<std::string>() << "\n";
    if (report.result.contains("B")) out << "B = " << format_double(report.result["B"].get<double>()) << "\n";
  }
  for (const Check& ch : report.checks) {
    out << (ch.passed ? "PASS " : "FAIL ") << ch.name << " (" << ch.violations << " violations, " << ch.samples
        << " samples)\n";
  }
  out << "verdict: " << (report.passed() ? "pass" : "fail") << "\n";
  if (!report.config.out.empty()) {
    try {
      write_report(report, report.config.out);
    } catch (const IOError& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return report.passed() ? 0 : 1;
}

}  // namespace bellman::cli
