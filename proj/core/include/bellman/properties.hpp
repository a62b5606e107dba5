#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bellman/bellman_function.hpp"
#include "bellman/parallel.hpp"

namespace bellman {

inline constexpr double kMarginTolerance = 1e-9;

// LHS - RHS of one inequality instance together with the magnitude of the
// terms that produced it. The instance passes when margin >= -tol * scale.
struct ScaledMargin {
  double margin = 0.0;
  double scale = 1.0;

  double relative() const { return margin / scale; }
  bool ok(double tol = kMarginTolerance) const { return margin >= -tol * scale; }
};

struct A2Margins {
  ScaledMargin lower;  // A(x) - 0
  ScaledMargin upper;  // A u^p + B v^q + C w^r - A(x)
};

A2Margins check_A2(const BellmanModel& model, const TriplePoint& x);

// 1/2 A(x1) + 1/2 A(x2) - A(x) - u |v1 - v2|/2 |w1 - w2|/2 with x the midpoint.
ScaledMargin check_A3_midpoint(const BellmanModel& model, const TriplePoint& x1, const TriplePoint& x2);

// d' hess_A(x) d - 2u |d_v| |d_w|. Throws BoundaryError near surfaces.
ScaledMargin check_A3_infinitesimal(const BellmanModel& model, const TriplePoint& x, const Vector3& d,
                                    double margin = kDefaultHessianMargin);

// A(x1) - A(x) - grad_A(x).(x1 - x) - (2/3) u |v1 - v| |w1 - w|.
ScaledMargin check_A4_tangent(const BellmanModel& model, const TriplePoint& x, const TriplePoint& x1);

// B(x) - 1/2 B(x1) - 1/2 B(x2) - u |v1 - v2|/2 |w1 - w2|/2. Throws DomainError
// if x is not the componentwise midpoint of x1 and x2.
ScaledMargin check_B_main(const BellmanModel& model, const BellmanPoint& x, const BellmanPoint& x1,
                          const BellmanPoint& x2);

// -d' hess_B(x) d - 2u |d_v| |d_w|.
ScaledMargin check_B_infinitesimal(const BellmanModel& model, const BellmanPoint& x, const Vector6& d,
                                   double margin = kDefaultHessianMargin);

// B(x) + dB(x)(x1 - x) - B(x1) - (2/3) u |v1 - v| |w1 - w|.
ScaledMargin check_B4(const BellmanModel& model, const BellmanPoint& x, const BellmanPoint& x1);

struct PropertyWitness {
  std::vector<double> point;  // concatenated coordinates of the instance
  double margin = 0.0;
  double scale = 1.0;
};

// worst_margin is the smallest relative margin (margin / scale) seen; it is
// >= -tol exactly when `violations` is empty.
struct PropertyResult {
  std::string name;
  std::size_t samples = 0;
  std::size_t skipped = 0;  // instances rejected by a Hessian margin rule
  double worst_margin = 0.0;
  std::size_t violation_count = 0;
  std::vector<PropertyWitness> violations;
  std::uint64_t seed = 0;
  double tol = kMarginTolerance;  // threshold applied to relative margins

  bool passed() const { return violation_count == 0; }
};

struct PropertyInstance {
  ScaledMargin margin;
  std::vector<double> point;
};

// Sharded randomized check. draw(rng) returns an instance, or nullopt to
// count the draw as skipped. Witnesses and counts are merged in sample order.
template <typename Draw>
PropertyResult scan_property(std::string name, std::size_t samples, std::uint64_t seed, unsigned threads,
                             std::size_t max_witnesses, double tol, Draw&& draw) {
  struct Partial {
    std::size_t skipped = 0;
    std::size_t violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::vector<PropertyWitness> witnesses;
  };
  const std::size_t shards = shard_count(samples);
  std::vector<Partial> parts(shards);
  for_each_shard(shards, threads, [&](std::size_t k) {
    Rng rng = shard_rng(seed, k);
    Partial& out = parts[k];
    const std::size_t end = std::min(samples, (k + 1) * kShardSize);
    for (std::size_t i = k * kShardSize; i < end; ++i) {
      std::optional<PropertyInstance> inst = draw(rng);
      if (!inst) {
        ++out.skipped;
        continue;
      }
      out.worst = std::min(out.worst, inst->margin.relative());
      if (!inst->margin.ok(tol)) {
        ++out.violations;
        if (out.witnesses.size() < max_witnesses) {
          out.witnesses.push_back({std::move(inst->point), inst->margin.margin, inst->margin.scale});
        }
      }
    }
  });
  PropertyResult res;
  res.name = std::move(name);
  res.samples = samples;
  res.seed = seed;
  res.tol = tol;
  res.worst_margin = std::numeric_limits<double>::infinity();
  for (auto& part : parts) {
    res.skipped += part.skipped;
    res.violation_count += part.violations;
    res.worst_margin = std::min(res.worst_margin, part.worst);
    for (auto& w : part.witnesses) {
      if (res.violations.size() < max_witnesses) res.violations.push_back(std::move(w));
    }
  }
  if (!std::isfinite(res.worst_margin)) res.worst_margin = 0.0;
  return res;
}

enum class Surface { UV, UW, VW };  // u^p = v^q, u^p = w^r, v^q = w^r
std::string_view to_string(Surface s);

struct C1Tolerance {
  double branch_rel = 1e-10;
  double fd_rel = 1e-5;
  double value_rel = 1e-10;
  double fd_step = 1e-6;
};

// Gradient continuity on one critical surface: closed-form gradients of the
// two adjacent branches and a central difference of eval_A straddling the
// surface. Relative errors use the natural per-component scale
// |dA/dx_i| + |A|/x_i. The recorded margin of a sample is
// 1 - max(error / allowed) over its checks, with tol = 0.
PropertyResult check_C1_across_surfaces(const BellmanModel& model, Surface surface, std::size_t samples,
                                        std::uint64_t seed, const C1Tolerance& tol = {},
                                        double log_lo = 1e-3, double log_hi = 1e3);

struct PropertyConfig {
  std::size_t samples = 100000;    // per randomized property
  std::size_t c1_samples = 1000;   // per critical surface
  std::size_t mollifier_samples = 200;
  std::uint64_t seed = 7;
  double tol = kMarginTolerance;
  double degenerate_fraction = 0.1;
  double log_lo = 1e-3;
  double log_hi = 1e3;
  double hessian_margin = kDefaultHessianMargin;
  double mollifier_eps = 0.05;
  std::size_t mollifier_nodes = 8;
  std::size_t max_witnesses = 100;
  unsigned threads = 1;
};

// Random triple: log-uniform coordinates, with `degenerate_fraction` of draws
// placed on or within relative gap 1e-4 of a critical surface, or on/near a
// coordinate plane.
TriplePoint sample_triple(Rng& rng, const Exponents& e, double log_lo, double log_hi,
                          double degenerate_fraction);
// Random point of the Bellman domain built on sample_triple.
BellmanPoint sample_bellman_point(Rng& rng, const Exponents& e, double log_lo, double log_hi,
                                  double degenerate_fraction);

// Runs every property above (plus the mollified-function checks), in a fixed
// order with per-property seed = config.seed + index.
std::vector<PropertyResult> run_suite(const Coefficients& c, const Exponents& e, const PropertyConfig& config);

}  // namespace bellman
