#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bellman/bellman_function.hpp"
#include "bellman/parallel.hpp"
#include "bellman/properties.hpp"

namespace bellman {

// Finite tree filtration. Level 0 holds the root; node i of level k + 1 has
// parent parent(k + 1, i) and conditional probability edge_prob(k + 1, i).
// Children of a node are contiguous.
class Filtration {
 public:
  // branch_probs[k][i] lists the child probabilities of node i of level k.
  // Throws ProbabilityError unless each list is nonempty, entries lie in
  // (0, 1] and sum to 1 within 1e-12.
  explicit Filtration(const std::vector<std::vector<std::vector<double>>>& branch_probs);

  static Filtration dyadic(unsigned depth);
  // Branching uniform in [1, max_branching] per node, Dirichlet-like weights.
  static Filtration random(Rng& rng, unsigned depth, unsigned max_branching);

  unsigned depth() const noexcept { return static_cast<unsigned>(parent_.size()) - 1; }
  std::size_t size(unsigned level) const { return parent_.at(level).size(); }
  std::size_t parent(unsigned level, std::size_t i) const { return parent_.at(level).at(i); }
  double edge_prob(unsigned level, std::size_t i) const { return edge_.at(level).at(i); }
  // Unconditional probability of node i of the level.
  double prob(unsigned level, std::size_t i) const { return prob_.at(level).at(i); }
  const std::vector<std::vector<std::vector<double>>>& branch_probs() const noexcept { return branch_; }
  bool uniform_dyadic() const noexcept { return dyadic_; }

 private:
  std::vector<std::vector<std::size_t>> parent_;
  std::vector<std::vector<double>> edge_;
  std::vector<std::vector<double>> prob_;
  std::vector<std::vector<std::vector<double>>> branch_;
  bool dyadic_ = false;
};

// Node-valued adapted process: values[k][i] at node i of level k.
using Process = std::vector<std::vector<double>>;

// E(terminal | F_k) for every level, by bottom-up conditional averaging.
Process conditional_expectations(const Filtration& tree, const std::vector<double>& terminal);

struct MartingaleTriple {
  Filtration tree;
  Process x, y, z;  // martingales
  Process u, v, w;  // E(X_n^p | F_k), E(Y_n^q | F_k), E(Z_n^r | F_k)
};

// Throws DomainError on negative or non-finite leaves, ConstraintViolation on
// a leaf count that does not match the tree.
MartingaleTriple martingale_from_terminal(const Filtration& tree, const Exponents& e, const std::vector<double>& x_leaf,
                                          const std::vector<double>& y_leaf, const std::vector<double>& z_leaf);

// max over nodes of |X_{k-1} - E(X_k | F_{k-1})|.
double martingale_defect(const Filtration& tree, const Process& x);

// (X.Y)_n = sum_{k=1}^n X_{k-1} (Y_k - Y_{k-1}) at the level-n nodes.
std::vector<double> paraproduct_discrete(const Filtration& tree, const Process& x, const Process& y, unsigned n);

// |E((X.Y)_n Z_n) - sum_k E(X_{k-1} dY_k dZ_k)|. The scale is
// E|(X.Y)_n Z_n| + sum_k E(|X_{k-1}| (|Y_k| + |Y_{k-1}|) (|Z_k| + |Z_{k-1}|)),
// the size of the cross terms the identity cancels.
struct DualDefect {
  double defect = 0.0;
  double scale = 1.0;
};
DualDefect dual_identity_check(const Filtration& tree, const Process& x, const Process& y, const Process& z,
                               unsigned n);

// Margins B(X_{k-1}) - E(B(X_k) | F_{k-1}) - (2/3) E(X_{k-1} |dY| |dZ| | F_{k-1})
// at every level-(k-1) node. Throws DomainError if a node leaves the domain.
std::vector<ScaledMargin> supermartingale_step_check(const Coefficients& c, const Exponents& e,
                                                     const MartingaleTriple& m, unsigned k);

struct DualizedEstimate {
  double paraproduct_mass = 0.0;   // sum_k E(X_{k-1} |dY_k| |dZ_k|)
  double young_bound = 0.0;        // C (|X_n|_p^p / p + |Y_n|_q^q / q + |Z_n|_r^r / r)
  double young_margin = 0.0;       // young_bound - (2/3) paraproduct_mass
  double telescoped = 0.0;         // E B(X_0) - E B(X_n)
  double telescoping_margin = 0.0; // telescoped - (2/3) paraproduct_mass
  double dual_value = 0.0;         // |E((X.Y)_n Z_n)|
  double norm_product = 0.0;       // |X_n|_p |Y_n|_q |Z_n|_r
  double constant = 0.0;           // C on uniform dyadic trees, 3/2 C otherwise
  double homogeneous_margin = 0.0; // constant * norm_product - dual_value
  double scale = 1.0;
  bool ok(double tol = kMarginTolerance) const {
    return young_margin >= -tol * scale && telescoping_margin >= -tol * scale && homogeneous_margin >= -tol * scale;
  }
};

DualizedEstimate verify_estimate_dualized(const Coefficients& c, const Exponents& e, const MartingaleTriple& m);

// Signed terminal values: X, Y, Z are split into positive and negative parts
// and the estimate is checked for all eight sign combinations; the signed
// dual value is then bounded by the sum of the parts.
struct SignedDualizedEstimate {
  std::vector<DualizedEstimate> parts;
  double dual_value = 0.0;   // |E((X.Y)_n Z_n)| for the signed inputs
  double parts_bound = 0.0;  // sum over parts of constant * norm_product
  bool ok(double tol = kMarginTolerance) const;
};

SignedDualizedEstimate verify_estimate_dualized_signed(const Coefficients& c, const Exponents& e,
                                                       const Filtration& tree, const std::vector<double>& x_leaf,
                                                       const std::vector<double>& y_leaf,
                                                       const std::vector<double>& z_leaf);

// |(X.Y)_n|_{r'} against 2 K |X_n|_p |Y_n|_q for nonnegative X, Y, using the
// extremal dual variable Z = sign(P) |P|^{r'-1}. K is the homogeneous
// constant of verify_estimate_dualized.
struct ParaproductNorm {
  double norm = 0.0;
  double bound = 0.0;
  double dual_attained = 0.0;  // E(P Z) / |Z|_r, equals norm
  bool ok() const { return norm <= bound; }
};
ParaproductNorm paraproduct_norm_check(const Coefficients& c, const Exponents& e, const Filtration& tree,
                                       const std::vector<double>& x_leaf, const std::vector<double>& y_leaf);

// Martingale of Brownian motion given as a function of (s, B_s).
struct MartingaleGenerator {
  std::string name;
  std::function<double(double s, double b)> fn;

  static MartingaleGenerator constant(double c);
  static MartingaleGenerator brownian();
  static MartingaleGenerator affine(double a, double b);
  static MartingaleGenerator exponential(double sigma);
  static MartingaleGenerator custom(std::string name, std::function<double(double, double)> fn);
};

struct BrownianGrid {
  std::size_t steps = 256;  // finest partition
  double horizon = 1.0;
  std::size_t paths = 100000;
  std::uint64_t seed = 7;
};

struct RiemannLevel {
  std::size_t steps = 0;
  double mean = 0.0;
  double mean_stderr = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
  double norm = 0.0;  // Monte Carlo L^{norm_exponent} norm of the Riemann sum
  double norm_change = 0.0;  // relative change from the previous level
  // Statistics of sum - reference(B_t), present when a reference is given.
  double ref_mean = 0.0;
  double ref_mean_stderr = 0.0;
  double ref_variance = 0.0;
  double ref_variance_stderr = 0.0;
};

struct RiemannReport {
  std::string x_name, y_name;
  BrownianGrid grid;
  double norm_exponent = 2.0;
  std::vector<RiemannLevel> levels;  // coarse to fine, sharing the same paths
  double increment_mean = 0.0;       // E(Y_t - Y_0) and its standard error
  double increment_stderr = 0.0;
  // Direct simulation of |Y_t - Y_0| in the same norm, for comparison with X = 1.
  double direct_norm = 0.0;
};

// Riemann sums sum_k X_{t_{k-1}} (Y_{t_k} - Y_{t_{k-1}}) for the partitions
// with grid.steps / 2^j steps (j = 0..refinements-1), evaluated on common
// paths. Throws SimulationError if E(X_t - X_0) or E(Y_t - Y_0) deviates from
// 0 by more than 6 standard errors, ConstraintViolation if grid.steps is not
// divisible by 2^(refinements - 1).
RiemannReport brownian_riemann_approx(const MartingaleGenerator& x, const MartingaleGenerator& y,
                                      const BrownianGrid& grid, std::size_t refinements, double norm_exponent,
                                      const std::function<double(double)>& reference = {}, unsigned threads = 1);

struct MartingaleSuiteConfig {
  std::size_t samples = 10000;
  unsigned depth = 8;
  unsigned general_depth = 5;
  unsigned max_branching = 3;
  std::uint64_t seed = 7;
  double identity_tol = 1e-12;
  double tol = kMarginTolerance;
  std::size_t max_witnesses = 20;
  unsigned threads = 1;
};

// Random nonnegative leaves: log-uniform on [1e-3, 1e3] with occasional zeros.
std::vector<double> random_leaves(Rng& rng, std::size_t n);

// Dual identity, martingale property, supermartingale steps, dualized and
// signed estimates and the paraproduct norm bound as randomized scans.
std::vector<PropertyResult> run_martingale_suite(const Coefficients& c, const Exponents& e,
                                                 const MartingaleSuiteConfig& config);

}  // namespace bellman
