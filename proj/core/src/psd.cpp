#include "bellman/psd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bellman/errors.hpp"

namespace bellman {

Matrix3 build_M(const BellmanModel& model, const GammaPoint& g, Sign sign) {
  const Region region = classify_gamma_region(g);
  if (region == Region::Boundary) {
    std::ostringstream os;
    os.precision(17);
    os << "(t, s) = (" << g.t() << ", " << g.s() << ") lies on a region boundary";
    throw BoundaryError(os.str());
  }
  const auto& e = model.exponents();
  const double p = e.p(), q = e.q(), r = e.r();
  const double t = g.t(), s = g.s();
  const GammaJet j = model.gamma_jet(region, g);

  Matrix3 m;
  m(0, 0) = p * (p - 1.0) * (j.value - t * j.dt - s * j.ds) + 2.0 * p * p * t * s * j.dts +
            p * p * t * t * j.dtt + p * p * s * s * j.dss;
  m(0, 1) = -p * q * std::pow(t, 1.0 - 1.0 / q) * s * j.dts - p * q * std::pow(t, 2.0 - 1.0 / q) * j.dtt;
  m(0, 2) = -p * r * t * std::pow(s, 1.0 - 1.0 / r) * j.dts - p * r * std::pow(s, 2.0 - 1.0 / r) * j.dss;
  m(1, 1) = q * (q - 1.0) * std::pow(t, 1.0 - 2.0 / q) * j.dt + q * q * std::pow(t, 2.0 - 2.0 / q) * j.dtt;
  m(1, 2) = q * r * std::pow(t, 1.0 - 1.0 / q) * std::pow(s, 1.0 - 1.0 / r) * j.dts + sign_value(sign);
  m(2, 2) = r * (r - 1.0) * std::pow(s, 1.0 - 2.0 / r) * j.ds + r * r * std::pow(s, 2.0 - 2.0 / r) * j.dss;
  m(1, 0) = m(0, 1);
  m(2, 0) = m(0, 2);
  m(2, 1) = m(1, 2);
  return m;
}

Matrix3 build_A_pm(const BellmanModel& model, const TriplePoint& x, Sign sign, double margin) {
  Matrix3 h = model.hess_A(x, margin);
  h(1, 2) += sign_value(sign) * x.u();
  h(2, 1) = h(1, 2);
  return h;
}

Matrix3 conjugation_diagonal(const Exponents& e, double u) {
  const double p = e.p();
  Matrix3 d = Matrix3::Zero();
  d(0, 0) = std::pow(u, 1.0 - p / 2.0);
  d(1, 1) = std::pow(u, p / e.q() - p / 2.0);
  d(2, 2) = std::pow(u, p / e.r() - p / 2.0);
  return d;
}

MinorTriple principal_minors(const Matrix3& m) {
  const double m1 = m(0, 0);
  const double m2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double m3 = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                    m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                    m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  return {m1, m2, m3};
}

double smallest_eigenvalue(const Matrix3& m) {
  Eigen::SelfAdjointEigenSolver<Matrix3> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

PsdVerdict psd_check(const Matrix3& m, const PsdTolerance& tol) {
  PsdVerdict v;
  v.minors = principal_minors(m);
  const double d1 = std::abs(m(0, 0));
  const double d2 = d1 * std::abs(m(1, 1));
  const double d3 = d2 * std::abs(m(2, 2));
  auto scaled = [](double x, double scale) { return scale > 0.0 ? x / scale : x; };
  v.scaled = {scaled(v.minors.m1, d1), scaled(v.minors.m2, d2), scaled(v.minors.m3, d3)};
  v.minors_ok = v.minors.m1 >= -(tol.abs + tol.rel * d1) && v.minors.m2 >= -(tol.abs + tol.rel * d2) &&
                v.minors.m3 >= -(tol.abs + tol.rel * d3);
  v.lambda_min = smallest_eigenvalue(m);
  v.lambda_scale = std::max({std::abs(m(0, 0)), std::abs(m(1, 1)), std::abs(m(2, 2))});
  v.eigen_ok = v.lambda_min >= -(tol.abs + tol.rel * v.lambda_scale);
  return v;
}

bool is_psd(const Matrix3& m, double tol_abs, double tol_rel) {
  return psd_check(m, {tol_abs, tol_rel}).psd();
}

MinorTriple region1_minors_closed(const Coefficients& c, const Exponents& e, const GammaPoint& g,
                                  Sign /*sign*/) {
  const double t = g.t(), s = g.s();
  if (!(1.0 < s && s < t)) throw DomainError("region-1 minors need 1 < s < t");
  const double p = e.p(), q = e.q(), r = e.r();
  const double A = c.a(), B = c.b(), C = c.c();
  const double tq = std::pow(t, 1.0 - 2.0 / q);
  const double sr = std::pow(s, 1.0 - 2.0 / r);
  // The +-1 enters the determinant squared, so both signs share the minors.
  return {A * p * (p - 1.0), A * B * p * (p - 1.0) * q * (q - 1.0) * tq,
          A * B * C * p * (p - 1.0) * q * (q - 1.0) * r * (r - 1.0) * tq * sr - A * p * (p - 1.0)};
}

GammaPoint sample_gamma_region(Rng& rng, Region region, double lo, double hi) {
  for (;;) {
    const double below_a = log_uniform(rng, lo, 1.0);
    const double below_b = log_uniform(rng, lo, 1.0);
    const double above_a = log_uniform(rng, 1.0, hi);
    const double above_b = log_uniform(rng, 1.0, hi);
    double t = 1.0, s = 1.0;
    switch (region) {
      case Region::R1: t = std::max(above_a, above_b); s = std::min(above_a, above_b); break;
      case Region::R2: t = above_a; s = below_a; break;
      case Region::R3: t = std::max(below_a, below_b); s = std::min(below_a, below_b); break;
      case Region::R4: s = std::max(below_a, below_b); t = std::min(below_a, below_b); break;
      case Region::R5: t = below_a; s = above_a; break;
      case Region::R6: s = std::max(above_a, above_b); t = std::min(above_a, above_b); break;
      case Region::Boundary: throw DomainError("cannot sample the boundary region");
    }
    const GammaPoint g(t, s);
    if (classify_gamma_region(g) == region) return g;
  }
}

namespace {

struct ShardResult {
  std::size_t violations[2] = {0, 0};
  std::size_t disagreements[2] = {0, 0};
  std::vector<ScanViolation> witnesses[2];
  double min_scaled[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double min_t[2] = {0, 0};
  double min_s[2] = {0, 0};
};

}  // namespace

std::vector<ScanReport> scan_regions(const Coefficients& c, const Exponents& e,
                                     const ScanConfig& config) {
  if (config.samples_per_region < 1) throw ConstraintViolation("scan needs at least one sample per region");
  const BellmanModel model(c, e);
  const std::size_t shards_per_region = shard_count(config.samples_per_region);
  const std::size_t total_shards = 6 * shards_per_region;
  std::vector<ShardResult> results(total_shards);

  for_each_shard(total_shards, config.threads, [&](std::size_t shard) {
    const std::size_t region_index = shard / shards_per_region;
    const std::size_t local = shard % shards_per_region;
    const Region region = kOpenRegions[region_index];
    const std::size_t begin = local * kShardSize;
    const std::size_t end = std::min(config.samples_per_region, begin + kShardSize);
    Rng rng = shard_rng(config.seed, shard);
    ShardResult& out = results[shard];
    for (std::size_t i = begin; i < end; ++i) {
      const GammaPoint g = sample_gamma_region(rng, region, config.log_lo, config.log_hi);
      for (int si = 0; si < 2; ++si) {
        const PsdVerdict v = psd_check(build_M(model, g, kSigns[si]), config.tol);
        const double worst = std::min({v.scaled.m1, v.scaled.m2, v.scaled.m3});
        if (worst < out.min_scaled[si]) {
          out.min_scaled[si] = worst;
          out.min_t[si] = g.t();
          out.min_s[si] = g.s();
        }
        if (!v.consistent()) ++out.disagreements[si];
        if (!v.psd() || !v.consistent()) {
          ++out.violations[si];
          if (out.witnesses[si].size() < config.max_witnesses) out.witnesses[si].push_back({g.t(), g.s(), i, v});
        }
      }
    }
  });

  std::vector<ScanReport> reports;
  reports.reserve(12);
  for (std::size_t ri = 0; ri < 6; ++ri) {
    for (int si = 0; si < 2; ++si) {
      ScanReport rep{e, c, kOpenRegions[ri], kSigns[si], config.samples_per_region, config.seed, 0, 0, {}, 0.0, 0.0, 0.0};
      rep.min_minor_scaled = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < shards_per_region; ++k) {
        const ShardResult& sr = results[ri * shards_per_region + k];
        rep.violation_count += sr.violations[si];
        rep.disagreement_count += sr.disagreements[si];
        for (const auto& w : sr.witnesses[si]) {
          if (rep.violations.size() < config.max_witnesses) rep.violations.push_back(w);
        }
        if (sr.min_scaled[si] < rep.min_minor_scaled) {
          rep.min_minor_scaled = sr.min_scaled[si];
          rep.min_t = sr.min_t[si];
          rep.min_s = sr.min_s[si];
        }
      }
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

std::size_t total_violations(const std::vector<ScanReport>& reports) {
  std::size_t n = 0;
  for (const auto& r : reports) n += r.violation_count;
  return n;
}

}  // namespace bellman
