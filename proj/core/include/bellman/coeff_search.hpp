#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellman/psd.hpp"

namespace bellman {

struct FeasibilitySpec {
  std::size_t samples_per_region = 4000;
  std::uint64_t seed = 7;
  PsdTolerance tol{};
  double log_lo = 1e-3;
  double log_hi = 1e3;
  unsigned threads = 1;

  // Throws ConstraintViolation unless samples_per_region >= 1 and 0 < lo < hi.
  void validate() const;
  ScanConfig scan_config() const;
};

struct FeasibilityWitness {
  std::string reason;  // "circled C", "circled A" or "psd"
  Region region = Region::Boundary;
  Sign sign = Sign::Plus;
  double t = 0.0, s = 0.0;
  MinorTriple scaled_minors;
  double lambda_min = 0.0;
};

struct FeasibilityResult {
  bool feasible = false;
  bool circled_ok = false;
  std::size_t violations = 0;  // psd violations over all regions and signs
  std::size_t samples = 0;     // points per region (each checked with both signs)
  std::optional<FeasibilityWitness> witness;
};

// Circled-term lower bounds on C and A, then scan_regions with zero
// violations for both signs.
FeasibilityResult feasibility_check(const Coefficients& c, const Exponents& e, const FeasibilitySpec& spec);

struct SearchStep {
  double a = 0.0, c = 0.0;
  bool feasible = false;
};

struct SearchReport {
  Coefficients coefficients{1.0, 1.0, 1.0};
  double constant = 0.0;          // max{Ap, Bq, Cr}
  double default_constant = 0.0;
  std::size_t evaluations = 0;    // feasibility checks on the search sample
  std::vector<SearchStep> trace;
  FeasibilityResult validation;   // fresh seed, same sample size
  std::uint64_t validation_seed = 0;
  std::size_t expansions = 0;     // validation failures repaired by moving toward the defaults
  bool fell_back_to_defaults = false;
  std::string label = "empirically feasible";
};

// B = 1; bisects A, then C, on a log scale between the circled lower bounds
// and the default coefficients, using at most `budget` feasibility checks.
// The result is re-checked on a fresh seed; on failure it is moved toward
// the defaults until the validation passes. Throws SearchFailure if the
// defaults themselves are infeasible under the feasibility settings, ConstraintViolation if
// budget is 0.
SearchReport search_coefficients(const Exponents& e, const FeasibilitySpec& spec, std::size_t budget);

}  // namespace bellman
