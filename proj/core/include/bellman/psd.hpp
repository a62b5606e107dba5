#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bellman/bellman_function.hpp"
#include "bellman/parallel.hpp"

namespace bellman {

enum class Sign : int { Plus = 1, Minus = -1 };
inline double sign_value(Sign s) { return static_cast<double>(static_cast<int>(s)); }
inline constexpr Sign kSigns[2] = {Sign::Plus, Sign::Minus};

// Leading principal minors of a symmetric 3x3 matrix; m3 is the determinant.
struct MinorTriple {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
};

struct PsdTolerance {
  double abs = 1e-12;
  double rel = 1e-9;
};

// Outcome of the two independent PSD tests on one matrix.
struct PsdVerdict {
  MinorTriple minors;
  MinorTriple scaled;       // m_k divided by the product of the first k |diagonal| entries
  double lambda_min = 0.0;  // smallest eigenvalue
  double lambda_scale = 0.0;
  bool minors_ok = false;
  bool eigen_ok = false;

  bool psd() const { return minors_ok && eigen_ok; }
  bool consistent() const { return minors_ok == eigen_ok; }
};

// The reduced matrix M(t, s) for the given sign; u-independent after
// conjugation by conjugation_diagonal(). Throws BoundaryError if (t, s) is not
// strictly inside one of the six gamma-regions.
Matrix3 build_M(const BellmanModel& model, const GammaPoint& g, Sign sign);

// hess_A(x) with +-u added in the (v, w) and (w, v) entries.
Matrix3 build_A_pm(const BellmanModel& model, const TriplePoint& x, Sign sign,
                   double margin = kDefaultHessianMargin);

// diag(u^{1-p/2}, u^{p/q-p/2}, u^{p/r-p/2}); M = D * A_pm * D.
Matrix3 conjugation_diagonal(const Exponents& e, double u);

MinorTriple principal_minors(const Matrix3& m);
double smallest_eigenvalue(const Matrix3& m);
PsdVerdict psd_check(const Matrix3& m, const PsdTolerance& tol = {});
bool is_psd(const Matrix3& m, double tol_abs = 1e-12, double tol_rel = 1e-9);

// Short closed-form minors for region 1 (1 < s < t). Throws DomainError
// outside region 1.
MinorTriple region1_minors_closed(const Coefficients& c, const Exponents& e, const GammaPoint& g,
                                  Sign sign);

struct ScanViolation {
  double t = 0.0;
  double s = 0.0;
  std::size_t sample_index = 0;
  PsdVerdict verdict;
};

struct ScanReport {
  Exponents exponents;
  Coefficients coefficients;
  Region region = Region::Boundary;
  Sign sign = Sign::Plus;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t violation_count = 0;  // includes minor/eigenvalue disagreements
  std::size_t disagreement_count = 0;
  std::vector<ScanViolation> violations;  // first max_witnesses, by sample index
  double min_minor_scaled = 0.0;
  double min_t = 0.0;  // location of min_minor_scaled
  double min_s = 0.0;
};

struct ScanConfig {
  std::size_t samples_per_region = 100000;
  std::uint64_t seed = 7;
  PsdTolerance tol{};
  double log_lo = 1e-3;
  double log_hi = 1e3;
  unsigned threads = 1;
  std::size_t max_witnesses = 1000;
};

// Draws a point strictly inside `region` of the (t, s) plane by order
// statistics of log-uniform draws on [lo, hi].
GammaPoint sample_gamma_region(Rng& rng, Region region, double lo, double hi);

// One report per (region, sign), ordered R1+, R1-, R2+, ..., R6-. The same
// sample points are used for both signs. Deterministic given the seed.
std::vector<ScanReport> scan_regions(const Coefficients& c, const Exponents& e,
                                     const ScanConfig& config);

std::size_t total_violations(const std::vector<ScanReport>& reports);

}  // namespace bellman
