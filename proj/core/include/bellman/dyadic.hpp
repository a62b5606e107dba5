#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bellman/bellman_function.hpp"
#include "bellman/parallel.hpp"
#include "bellman/properties.hpp"

namespace bellman {

// Dyadic subinterval [index 2^-level, (index + 1) 2^-level) of I0 = [0, 1).
struct TreeNode {
  unsigned level = 0;
  std::uint64_t index = 0;

  TreeNode left() const { return {level + 1, 2 * index}; }
  TreeNode right() const { return {level + 1, 2 * index + 1}; }
  double length() const;
  bool contains(const TreeNode& other) const;
  bool operator==(const TreeNode&) const = default;
};

// Throws IndexError unless index < 2^level and level < 63.
void validate(const TreeNode& node);

// Nonnegative step function on I0 with 2^depth equal cells.
class DyadicStep {
 public:
  // Throws ConstraintViolation unless the size is a power of two, DomainError
  // on negative or non-finite values.
  explicit DyadicStep(std::vector<double> values);
  static DyadicStep constant(unsigned depth, double value);

  unsigned depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Same function on a finer grid: every cell is repeated 2^(depth - depth()) times.
  DyadicStep refined(unsigned depth) const;
  // Cellwise power.
  DyadicStep pow(double exponent) const;

  bool operator==(const DyadicStep&) const = default;

 private:
  unsigned depth_ = 0;
  std::vector<double> values_;
};

// Signed step function; the output type of the paraproduct operator.
class SignedStep {
 public:
  explicit SignedStep(std::vector<double> values);

  unsigned depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  unsigned depth_ = 0;
  std::vector<double> values_;
};

// Integral over I0 of the cellwise product.
double integrate_product(const SignedStep& a, const DyadicStep& b);

// One coefficient per node of levels 0..levels-1, stored in heap order
// (node (l, i) at 2^l - 1 + i).
class SignPattern {
 public:
  // Throws DomainError if any |eps| > 1, ConstraintViolation on a size that
  // is not 2^levels - 1.
  explicit SignPattern(std::vector<double> eps);
  static SignPattern constant(unsigned levels, double value);
  static SignPattern random(Rng& rng, unsigned levels);

  unsigned levels() const noexcept { return levels_; }
  double at(const TreeNode& node) const;
  const std::vector<double>& values() const noexcept { return eps_; }

 private:
  unsigned levels_ = 0;
  std::vector<double> eps_;
};

// [f]_J. Nodes finer than the depth of f lie inside one cell.
double average(const DyadicStep& f, const TreeNode& node);
// ([f]_{J_left} - [f]_{J_right}) / 2; zero below the depth of f.
double haar_diff(const DyadicStep& f, const TreeNode& node);

// Averages of all nodes of levels 0..depth in heap order.
std::vector<double> node_averages(const DyadicStep& f);

// (1/|I|) sum over J in I of |J| [f]_J |haar_diff(g, J)| |haar_diff(h, J)|.
// Inputs of different depth are refined to the common depth.
double phi_form(const DyadicStep& f, const DyadicStep& g, const DyadicStep& h, const TreeNode& node);

// sum over J of eps_J |J| [f]_J haar_diff(g, J) haar_diff(h, J). The pattern
// must cover every level above the common depth (ConstraintViolation).
double lambda_form(const SignPattern& eps, const DyadicStep& f, const DyadicStep& g, const DyadicStep& h);
// sum over J of eps_J [f]_J haar_diff(g, J) h_J with h_J = +1 on J_left, -1 on J_right.
SignedStep pi_apply(const SignPattern& eps, const DyadicStep& f, const DyadicStep& g);

// Mf = sup over J containing the cell of [f]_J; Sf = (sum_J haar_diff(f, J)^2 1_J)^(1/2).
DyadicStep maximal_fn(const DyadicStep& f);
DyadicStep square_fn(const DyadicStep& f);

struct NormalizedEstimate {
  double phi = 0.0;
  double bound = 0.0;    // C ([f^p]/p + [g^q]/q + [h^r]/r)
  double margin = 0.0;   // bound - phi
  double norm_product = 0.0;      // ||f||_p ||g||_q ||h||_r over I (means)
  double homogeneous_ratio = 0.0; // phi / norm_product, 0 when the product vanishes
  bool ok() const { return margin >= 0.0; }
};

NormalizedEstimate verify_normalized_estimate(const Coefficients& c, const Exponents& e, const DyadicStep& f,
                                              const DyadicStep& g, const DyadicStep& h, const TreeNode& node);

// Moment point ([f]_J, [g]_J, [h]_J, [f^p]_J, [g^q]_J, [h^r]_J). Rounding is
// clamped so that the point stays in the domain.
BellmanPoint moment_point(const Exponents& e, const DyadicStep& f, const DyadicStep& g, const DyadicStep& h,
                          const TreeNode& node);

// Entry k (k = 0..levels) is |I| B(x_I) - sum_{|J| = 2^-k |I|} |J| B(x_J)
// - sum_{|J| > 2^-k |I|} |J| [f]_J |dg/2| |dh/2|, divided by |I|. Throws
// ConstraintViolation if node.level + levels exceeds the common depth.
std::vector<ScaledMargin> bellman_induction_check(const Coefficients& c, const Exponents& e, const DyadicStep& f,
                                                  const DyadicStep& g, const DyadicStep& h, const TreeNode& node,
                                                  unsigned levels);

// Step function on 2^depth cells with mean m and mean of f^power equal to
// moment (bisection on the dispersion of `shape`, resolved from below).
// Falls back to a single-cell spike if the shape cannot reach the moment.
// Throws InfeasibleMoments if no nonnegative step function of that depth can.
DyadicStep match_moments(const std::vector<double>& shape, double mean, double moment, double power);

struct AbstractLowerConfig {
  unsigned depth = 6;
  std::size_t iters = 64;  // perturbations per depth level
  std::uint64_t seed = 7;
};

struct AbstractLowerResult {
  double value = 0.0;               // best Phi over the candidates; <= abstract B(x)
  std::vector<double> per_depth;    // best value after each depth, nondecreasing
  DyadicStep f = DyadicStep::constant(0, 0.0);
  DyadicStep g = DyadicStep::constant(0, 0.0);
  DyadicStep h = DyadicStep::constant(0, 0.0);
};

// Randomized local search over moment-matched step-function triples,
// maximizing Phi_{I0}. Deeper levels start from the refined best triple.
AbstractLowerResult abstract_bellman_lower(const Coefficients& c, const Exponents& e, const BellmanPoint& x,
                                           const AbstractLowerConfig& config = {});

// Random triple of common depth in [1, max_depth]; cells log-uniform on
// [1e-3, 1e3], with a fraction of zero and constant stretches.
struct DyadicTriple {
  DyadicStep f, g, h;
};
DyadicTriple random_dyadic_triple(Rng& rng, unsigned max_depth);
DyadicStep random_dyadic_step(Rng& rng, unsigned depth);

struct DyadicSuiteConfig {
  std::size_t samples = 10000;
  unsigned max_depth = 10;
  std::size_t abstract_samples = 1000;
  unsigned abstract_depth = 6;
  std::size_t abstract_iters = 64;
  std::uint64_t seed = 7;
  double identity_tol = 1e-12;
  double tol = kMarginTolerance;
  std::size_t max_witnesses = 20;
  unsigned threads = 1;
};

// Scaling identity, duality, square-function identity, normalized estimate,
// Bellman induction and the abstract lower bracket, each as a randomized scan.
std::vector<PropertyResult> run_dyadic_suite(const Coefficients& c, const Exponents& e,
                                             const DyadicSuiteConfig& config);

}  // namespace bellman
