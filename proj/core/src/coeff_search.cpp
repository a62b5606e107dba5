#include "bellman/coeff_search.hpp"

#include <cmath>

#include "bellman/errors.hpp"

namespace bellman {
namespace {

constexpr double kBisectionRatio = 1.001;
constexpr std::uint64_t kValidationSeedOffset = 1000003;
constexpr int kExpansionSteps = 4;

}  // namespace

void FeasibilitySpec::validate() const {
  if (samples_per_region < 1) throw ConstraintViolation("feasibility spec needs at least one sample per region");
  if (!(log_lo > 0.0 && log_hi > log_lo)) throw ConstraintViolation("feasibility spec needs 0 < log_lo < log_hi");
}

ScanConfig FeasibilitySpec::scan_config() const {
  ScanConfig cfg;
  cfg.samples_per_region = samples_per_region;
  cfg.seed = seed;
  cfg.tol = tol;
  cfg.log_lo = log_lo;
  cfg.log_hi = log_hi;
  cfg.threads = threads;
  cfg.max_witnesses = 1;
  return cfg;
}

FeasibilityResult feasibility_check(const Coefficients& c, const Exponents& e, const FeasibilitySpec& spec) {
  spec.validate();
  FeasibilityResult res;
  res.samples = spec.samples_per_region;
  const bool c_ok = c.c() >= circled_lower_bound_c(e, c.b());
  const bool a_ok = c.a() >= circled_lower_bound_a(e, c.b());
  res.circled_ok = c_ok && a_ok;
  if (!c_ok || !a_ok) {
    res.witness.emplace();
    res.witness->reason = !c_ok ? "circled C" : "circled A";
  }

  const std::vector<ScanReport> reports = scan_regions(c, e, spec.scan_config());
  res.violations = total_violations(reports);
  if (!res.witness) {
    for (const ScanReport& r : reports) {
      if (r.violations.empty()) continue;
      const ScanViolation& v = r.violations.front();
      res.witness = FeasibilityWitness{"psd", r.region, r.sign, v.t, v.s, v.verdict.scaled, v.verdict.lambda_min};
      break;
    }
  }
  res.feasible = res.circled_ok && res.violations == 0;
  return res;
}

SearchReport search_coefficients(const Exponents& e, const FeasibilitySpec& spec, std::size_t budget) {
  spec.validate();
  if (budget < 1) throw ConstraintViolation("coefficient search needs a budget of at least one evaluation");
  const Coefficients defaults = coefficients_default(e);
  SearchReport rep;
  rep.default_constant = c_constant(defaults, e);

  auto evaluate = [&](double a, double c) {
    ++rep.evaluations;
    const bool ok = feasibility_check(Coefficients(a, 1.0, c), e, spec).feasible;
    rep.trace.push_back({a, c, ok});
    return ok;
  };
  if (!evaluate(defaults.a(), defaults.c())) {
    throw SearchFailure("default coefficients are infeasible on this sample; check the tolerances");
  }

  // Feasibility is increasing in each coefficient, so each coordinate is
  // bisected on a log scale with the other held fixed.
  double a = defaults.a(), c = defaults.c();
  auto bisect = [&](double lo, double hi, auto&& feasible_at) {
    while (rep.evaluations < budget && hi / lo > kBisectionRatio) {
      const double mid = std::sqrt(lo * hi);
      if (feasible_at(mid)) hi = mid;
      else lo = mid;
    }
    return hi;
  };
  a = bisect(circled_lower_bound_a(e, 1.0), a, [&](double x) { return evaluate(x, c); });
  c = bisect(circled_lower_bound_c(e, 1.0), c, [&](double x) { return evaluate(a, x); });

  FeasibilitySpec fresh = spec;
  fresh.seed = spec.seed + kValidationSeedOffset;
  rep.validation_seed = fresh.seed;
  const double a_found = a, c_found = c;
  for (int k = 0;; ++k) {
    const double w = static_cast<double>(k) / kExpansionSteps;
    a = std::pow(a_found, 1.0 - w) * std::pow(defaults.a(), w);
    c = std::pow(c_found, 1.0 - w) * std::pow(defaults.c(), w);
    if (k == kExpansionSteps) {
      a = defaults.a();
      c = defaults.c();
    }
    rep.validation = feasibility_check(Coefficients(a, 1.0, c), e, fresh);
    if (rep.validation.feasible) break;
    if (k == kExpansionSteps) throw SearchFailure("default coefficients fail the validation sample");
    ++rep.expansions;
  }
  rep.coefficients = Coefficients(a, 1.0, c);
  rep.fell_back_to_defaults = rep.coefficients == defaults;
  rep.constant = c_constant(rep.coefficients, e);
  return rep;
}

}  // namespace bellman
