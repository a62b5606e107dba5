#include <array>

#include "bellman/coeff_search.hpp"
#include "bellman/errors.hpp"
#include "doctest.h"

using namespace bellman;

namespace {

FeasibilitySpec small_spec() {
  FeasibilitySpec spec;
  spec.samples_per_region = 1000;
  return spec;
}

}  // namespace

TEST_CASE("defaults are feasible and unit coefficients are not") {
  const Exponents e(2, 6, 3);
  const FeasibilityResult ok = feasibility_check(coefficients_default(e), e, small_spec());
  CHECK(ok.feasible);
  CHECK(ok.circled_ok);
  CHECK(ok.violations == 0);
  CHECK_FALSE(ok.witness);

  const FeasibilityResult bad = feasibility_check(Coefficients(1, 1, 1), e, small_spec());
  CHECK_FALSE(bad.feasible);
  REQUIRE(bad.witness);
  CHECK(bad.witness->reason == "circled A");

  // Circled bounds hold, the scan fails.
  const FeasibilityResult psd = feasibility_check(Coefficients(1.5, 1, 0.5), e, small_spec());
  CHECK(psd.circled_ok);
  CHECK_FALSE(psd.feasible);
  CHECK(psd.violations > 0);
  REQUIRE(psd.witness);
  CHECK(psd.witness->reason == "psd");
  CHECK(psd.witness->region != Region::Boundary);
}

TEST_CASE("scaling feasible coefficients up keeps them feasible") {
  for (auto [p, q, r] : {std::array<double, 3>{2, 6, 3}, {3, 6, 2}}) {
    const Exponents e(p, q, r);
    for (double lambda : {1.5, 4.0, 100.0}) {
      CHECK(feasibility_check(coefficients_default(e).scaled(lambda), e, small_spec()).feasible);
    }
  }
}

TEST_CASE("search improves on the defaults and validates") {
  const Exponents e(2, 6, 3);
  const FeasibilitySpec spec = small_spec();
  const SearchReport rep = search_coefficients(e, spec, 20);
  CHECK(rep.evaluations <= 20);
  CHECK(rep.trace.size() == rep.evaluations);
  CHECK(rep.trace.front().feasible);
  CHECK(rep.trace.front().a == 57024.0);
  CHECK(rep.constant <= rep.default_constant);
  CHECK(rep.default_constant == 114048.0);
  CHECK(rep.constant < 0.5 * rep.default_constant);
  CHECK(rep.validation.feasible);
  CHECK(rep.validation_seed != spec.seed);
  CHECK(rep.label == "empirically feasible");
  CHECK(rep.coefficients.b() == 1.0);
  CHECK(satisfies_circled_conditions(rep.coefficients, e));

  const SearchReport again = search_coefficients(e, spec, 20);
  CHECK(again.coefficients.a() == rep.coefficients.a());
  CHECK(again.coefficients.c() == rep.coefficients.c());
  FeasibilitySpec threaded = spec;
  threaded.threads = 3;
  CHECK(search_coefficients(e, threaded, 20).constant == rep.constant);
}

TEST_CASE("budget limits") {
  const Exponents e(3, 6, 2);
  const SearchReport one = search_coefficients(e, small_spec(), 1);
  CHECK(one.evaluations == 1);
  CHECK(one.constant == one.default_constant);
  CHECK(one.coefficients.a() == coefficients_default(e).a());
  CHECK_THROWS_AS(search_coefficients(e, small_spec(), 0), ConstraintViolation);
  FeasibilitySpec bad = small_spec();
  bad.samples_per_region = 0;
  CHECK_THROWS_AS(bad.validate(), ConstraintViolation);
  bad = small_spec();
  bad.log_lo = 10;
  bad.log_hi = 1;
  CHECK_THROWS_AS(search_coefficients(e, bad, 5), ConstraintViolation);
}
