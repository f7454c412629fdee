#pragma once

// Unions of equal-radius balls, their Minkowski sums, Monte Carlo volumes,
// and the ball-packing arguments behind |S| < 2^{n+1} for (A') and the linear
// bound for (A).
//
// B(a, r) + B(b, s) = B(a + b, r + s), and + distributes over unions, so the
// sum of two ball unions is the union of balls at all pairwise centre sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "minex/conditions.hpp"
#include "minex/linalg.hpp"
#include "minex/norms.hpp"
#include "minex/parallel.hpp"
#include "minex/rng.hpp"
#include "minex/scalar.hpp"

namespace minex {

template <Scalar T>
struct BallUnionRegion {
  std::vector<Vector<T>> centers;
  T radius = T(1);
  NormSpec<T> norm = NormSpec<T>::linf(1);

  BallUnionRegion() = default;
  BallUnionRegion(std::vector<Vector<T>> c, T r, NormSpec<T> nm) : centers(std::move(c)), radius(std::move(r)), norm(std::move(nm)) {
    if (sign_of(radius) <= 0) throw Error("ball union: radius must be positive");
    if (centers.empty()) throw Error("ball union: at least one centre is required");
    for (const auto& x : centers)
      if (x.dim() != norm.dim()) throw DimensionError("ball union: centre dimension differs from the norm");
  }

  std::size_t dim() const { return norm.dim(); }

  /// min_i Phi(x - c_i) <= radius (+ tol in floating mode)
  bool contains(const Vector<T>& x, double tol = 0.0) const {
    for (const auto& c : centers)
      if (leq_tol(evaluate_norm(norm, x - c), radius, tol)) return true;
    return false;
  }
};

template <Scalar T>
BallUnionRegion<double> to_double(const BallUnionRegion<T>& r) {
  std::vector<Vector<double>> cs;
  for (const auto& c : r.centers) cs.push_back(to_double(c));
  return BallUnionRegion<double>(std::move(cs), to_double(r.radius), to_double(r.norm));
}

template <Scalar T>
BallUnionRegion<T> minkowski_sum_regions(const BallUnionRegion<T>& u, const BallUnionRegion<T>& v) {
  if (u.dim() != v.dim() || u.norm.describe() != v.norm.describe())
    throw Error("minkowski_sum_regions: regions use different norms");
  std::vector<Vector<T>> cs;
  cs.reserve(u.centers.size() * v.centers.size());
  for (const auto& a : u.centers)
    for (const auto& b : v.centers) cs.push_back(a + b);
  return BallUnionRegion<T>(std::move(cs), T(u.radius + v.radius), u.norm);
}

struct VolumeEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  std::uint64_t seed = 0;
  Vector<double> box_lo, box_hi;
};

struct SamplingOptions {
  unsigned threads = 0;
  std::uint64_t chunk = 4096;
};

namespace detail {

// Half-widths of the bounding box of B(0, 1): max{|u_i| : Phi(u) <= 1} = Phi*(e_i).
inline Vector<double> unit_ball_half_widths(const NormSpec<double>& norm) {
  const std::size_t n = norm.dim();
  Vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = dual_norm(norm, Vector<double>::unit(n, i));
  return h;
}

// Uniform point of B(c, r) by rejection from its bounding box.
inline Vector<double> sample_ball(Rng& rng, const NormSpec<double>& norm, const Vector<double>& c, double r,
                                  const Vector<double>& half) {
  const std::size_t n = norm.dim();
  for (;;) {
    Vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = rng.uniform(-half[i], half[i]);
    if (evaluate_norm(norm, u) <= 1.0) return c + u * r;
  }
}

}  // namespace detail

inline constexpr std::uint64_t kMinVolumeSamples = 1000;

/// Hit-ratio estimate over the tight bounding box of the region.
inline VolumeEstimate mc_volume(const BallUnionRegion<double>& region, std::uint64_t samples, std::uint64_t seed,
                                const SamplingOptions& opt = {}) {
  if (samples < kMinVolumeSamples) throw Error("mc_volume: at least 1000 samples are required");
  const std::size_t n = region.dim();
  const Vector<double> half = detail::unit_ball_half_widths(region.norm);
  VolumeEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.box_lo = Vector<double>(n);
  est.box_hi = Vector<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lo = region.centers[0][i], hi = lo;
    for (const auto& c : region.centers) {
      lo = std::min(lo, c[i]);
      hi = std::max(hi, c[i]);
    }
    est.box_lo[i] = lo - region.radius * half[i];
    est.box_hi[i] = hi + region.radius * half[i];
  }
  double box = 1.0;
  for (std::size_t i = 0; i < n; ++i) box *= est.box_hi[i] - est.box_lo[i];

  const std::uint64_t chunk = std::max<std::uint64_t>(1, opt.chunk);
  const std::size_t chunks = static_cast<std::size_t>((samples + chunk - 1) / chunk);
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_chunks(chunks, resolve_threads(opt.threads), [&](std::size_t c) {
    Rng rng(substream_seed(seed, c));
    const std::uint64_t lo = c * chunk, hi = std::min(samples, lo + chunk);
    std::uint64_t h = 0;
    Vector<double> x(n);
    for (std::uint64_t k = lo; k < hi; ++k) {
      for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(est.box_lo[i], est.box_hi[i]);
      if (region.contains(x)) ++h;
    }
    hits[c] = h;
  });
  est.hits = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  const double p = static_cast<double>(est.hits) / static_cast<double>(samples);
  est.value = box * p;
  est.standard_error = box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return est;
}

struct GeometryCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct BrunnMinkowskiCheck {
  double lhs = 0.0;    // vol(U + V)^{1/n}
  double rhs = 0.0;    // sum of vol(V_i)^{1/n}
  double sigma = 0.0;  // combined standard error of lhs - rhs
  bool passed = false; // lhs >= rhs - 3 sigma
};

struct Theorem2GeometryReport {
  bool passed = false;
  std::size_t k = 0;
  std::vector<std::size_t> s1, s2;  // indices into S
  double min_pair_distance = 0.0;
  double min_center_distance = 0.0;
  std::uint64_t containment_samples = 0;
  std::uint64_t containment_violations = 0;
  VolumeEstimate vol_v1, vol_v2, vol_sum;
  BrunnMinkowskiCheck brunn_minkowski;
  double packing_lhs = 2.0;  // 2 >= (1/2)(floor(k/2)+1)^{1/n} + (1/2)(ceil(k/2)+1)^{1/n}
  double packing_rhs = 0.0;
  std::vector<GeometryCheck> checks;
};

struct LinearBoundGeometryReport {
  bool passed = false;
  std::size_t triples = 0;
  std::vector<std::vector<std::size_t>> partition;  // index triples into S
  std::vector<std::size_t> leftover;
  std::size_t disjointness_pairs = 0;
  std::size_t disjointness_failures = 0;
  double min_center_distance = 0.0;
  std::uint64_t containment_samples = 0;
  std::uint64_t containment_violations = 0;
  double containment_radius = 0.0;  // k/2 + 1
  std::optional<BrunnMinkowskiCheck> brunn_minkowski;
  double bound = 0.0;  // 2 / (6^{1/n} - 1)
  std::vector<GeometryCheck> checks;
};

struct GeometryOptions {
  double tolerance = 1e-9;
  std::optional<std::uint64_t> shuffle_seed;  // permute S before partitioning
  unsigned threads = 0;
};

namespace detail {

inline void require_geometry_dim(std::size_t n) {
  if (n != 2 && n != 3) throw DimensionError("volume geometry checks support n = 2 and n = 3 only");
}

inline std::vector<std::size_t> partition_order(std::size_t m, const GeometryOptions& opt) {
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  if (opt.shuffle_seed) {
    Rng rng(*opt.shuffle_seed);
    for (std::size_t i = m; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  }
  return idx;
}

// Samples `samples` points of the region (centre uniformly, then uniform in its
// ball) and counts those with Phi(x) > bound + tol.
inline std::uint64_t containment_violations(const BallUnionRegion<double>& region, double bound,
                                            std::uint64_t samples, std::uint64_t seed, double tol,
                                            const SamplingOptions& opt = {}) {
  const Vector<double> half = unit_ball_half_widths(region.norm);
  const std::uint64_t chunk = std::max<std::uint64_t>(1, opt.chunk);
  const std::size_t chunks = static_cast<std::size_t>((samples + chunk - 1) / chunk);
  std::vector<std::uint64_t> bad(chunks, 0);
  parallel_chunks(chunks, resolve_threads(opt.threads), [&](std::size_t c) {
    Rng rng(substream_seed(seed, c));
    const std::uint64_t lo = c * chunk, hi = std::min(samples, lo + chunk);
    for (std::uint64_t k = lo; k < hi; ++k) {
      const auto& ctr = region.centers[rng.below(region.centers.size())];
      const Vector<double> x = sample_ball(rng, region.norm, ctr, region.radius, half);
      if (evaluate_norm(region.norm, x) > bound + tol) ++bad[c];
    }
  });
  return std::accumulate(bad.begin(), bad.end(), std::uint64_t{0});
}

inline BrunnMinkowskiCheck brunn_minkowski(const VolumeEstimate& sum, const std::vector<VolumeEstimate>& parts,
                                           std::size_t n) {
  const double e = 1.0 / static_cast<double>(n);
  // delta method: sd(v^{1/n}) ~ (1/n) v^{1/n - 1} sd(v)
  auto root_sd = [&](const VolumeEstimate& v) {
    return v.value > 0.0 ? e * std::pow(v.value, e - 1.0) * v.standard_error : 0.0;
  };
  BrunnMinkowskiCheck b;
  b.lhs = std::pow(sum.value, e);
  double var = root_sd(sum) * root_sd(sum);
  for (const auto& p : parts) {
    b.rhs += std::pow(p.value, e);
    var += root_sd(p) * root_sd(p);
  }
  b.sigma = std::sqrt(var);
  b.passed = b.lhs >= b.rhs - 3.0 * b.sigma;
  return b;
}

template <Scalar T>
T min_pairwise_distance(const std::vector<Vector<T>>& pts, const NormSpec<T>& norm) {
  std::optional<T> best;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const T d = evaluate_norm(norm, pts[i] - pts[j]);
      if (!best || d < *best) best = d;
    }
  return best ? *best : T(0);
}

inline GeometryCheck make_check(std::string name, bool ok, std::string detail = {}) {
  return GeometryCheck{std::move(name), ok, std::move(detail)};
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// The six checks of the (A') packing argument: separation, partition,
/// disjointness, sampled containment of V_1 + V_2 in B(0, 2), the sampled
/// Brunn-Minkowski inequality at 3 sigma, and the resulting bound |S| < 2^{n+1}.
template <Scalar T>
Theorem2GeometryReport verify_theorem2_geometry(const VectorSet<T>& s, std::uint64_t samples, std::uint64_t seed,
                                                const GeometryOptions& opt = {}) {
  const std::size_t n = s.dim();
  detail::require_geometry_dim(n);
  CheckOptions copt;
  copt.tolerance = opt.tolerance;
  if (!check_weak_collapsing(s, copt).passed)
    throw Error("verify_theorem2_geometry: S does not satisfy the weak collapsing condition");

  Theorem2GeometryReport rep;
  const std::size_t k = s.size();
  rep.k = k;
  const NormSpec<T>& norm = s.norm();
  const T half = T(1) / T(2);

  // (1) Phi(x - y) >= 1
  const T sep = detail::min_pairwise_distance(s.vectors(), norm);
  rep.min_pair_distance = k >= 2 ? to_double(sep) : 1.0;
  const bool sep_ok = k < 2 || leq_tol(T(1), sep, opt.tolerance);
  rep.checks.push_back(detail::make_check("separation", sep_ok, "min Phi(x - y) = " + detail::fmt(rep.min_pair_distance)));

  // (2) S_1 = first floor(k/2), S_2 = the rest; V_i = B(0, 1/2) and B(x, 1/2) for x in S_i
  const auto order = detail::partition_order(k, opt);
  rep.s1.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k / 2));
  rep.s2.assign(order.begin() + static_cast<std::ptrdiff_t>(k / 2), order.end());
  auto centers_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<Vector<T>> cs{Vector<T>(n)};
    for (auto i : idx) cs.push_back(s[i]);
    return cs;
  };
  const BallUnionRegion<T> v1(centers_of(rep.s1), half, norm), v2(centers_of(rep.s2), half, norm);
  const bool part_ok = rep.s1.size() == k / 2 && rep.s2.size() == k - k / 2;
  rep.checks.push_back(detail::make_check("partition", part_ok,
                                          std::to_string(rep.s1.size()) + " + " + std::to_string(rep.s2.size())));

  // (3) centre distances >= 2 * (1/2)
  const T d1 = detail::min_pairwise_distance(v1.centers, norm), d2 = detail::min_pairwise_distance(v2.centers, norm);
  const bool one_ball1 = v1.centers.size() < 2, one_ball2 = v2.centers.size() < 2;
  const bool disj_ok = (one_ball1 || leq_tol(T(1), d1, opt.tolerance)) && (one_ball2 || leq_tol(T(1), d2, opt.tolerance));
  rep.min_center_distance = std::min(one_ball1 ? 1.0 : to_double(d1), one_ball2 ? 1.0 : to_double(d2));
  rep.checks.push_back(detail::make_check("disjointness", disj_ok, "min centre distance = " + detail::fmt(rep.min_center_distance)));

  // (4) V_1 + V_2 inside B(0, 2)
  const BallUnionRegion<double> v1d = to_double(v1), v2d = to_double(v2);
  const BallUnionRegion<double> sum = minkowski_sum_regions(v1d, v2d);
  SamplingOptions sopt;
  sopt.threads = opt.threads;
  rep.containment_samples = samples;
  rep.containment_violations =
      detail::containment_violations(sum, 2.0, samples, substream_seed(seed, 0), opt.tolerance, sopt);
  rep.checks.push_back(detail::make_check("containment", rep.containment_violations == 0,
                                          std::to_string(rep.containment_violations) + " violations in " +
                                              std::to_string(samples) + " samples"));

  // (5) Brunn-Minkowski on the sampled volumes
  rep.vol_v1 = mc_volume(v1d, samples, substream_seed(seed, 1), sopt);
  rep.vol_v2 = mc_volume(v2d, samples, substream_seed(seed, 2), sopt);
  rep.vol_sum = mc_volume(sum, samples, substream_seed(seed, 3), sopt);
  rep.brunn_minkowski = detail::brunn_minkowski(rep.vol_sum, {rep.vol_v1, rep.vol_v2}, n);
  rep.checks.push_back(detail::make_check("brunn-minkowski", rep.brunn_minkowski.passed,
                                          detail::fmt(rep.brunn_minkowski.lhs) + " >= " +
                                              detail::fmt(rep.brunn_minkowski.rhs) + " - 3 * " +
                                              detail::fmt(rep.brunn_minkowski.sigma)));

  // (6) 2 >= (1/2)(floor(k/2)+1)^{1/n} + (1/2)(ceil(k/2)+1)^{1/n}, hence k < 2^{n+1}
  const double e = 1.0 / static_cast<double>(n);
  rep.packing_rhs = 0.5 * std::pow(static_cast<double>(k / 2 + 1), e) + 0.5 * std::pow(static_cast<double>(k - k / 2 + 1), e);
  const bool card_ok = rep.packing_lhs >= rep.packing_rhs && k < (std::size_t{1} << (n + 1));
  rep.checks.push_back(detail::make_check("cardinality", card_ok,
                                          "|S| = " + std::to_string(k) + " < 2^(n+1) = " +
                                              std::to_string(std::size_t{1} << (n + 1))));

  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const GeometryCheck& c) { return c.passed; });
  return rep;
}

inline constexpr std::size_t kMaxFoldedTriples = 6;

/// The (A) packing argument with triples: 15 disjointness conditions per V_i,
/// sampled containment of V_1 + ... + V_k in B(0, k/2 + 1), and k <= 2/(6^{1/n} - 1).
template <Scalar T>
LinearBoundGeometryReport verify_linear_bound_geometry(const VectorSet<T>& s, std::uint64_t samples,
                                                       std::uint64_t seed, const GeometryOptions& opt = {}) {
  const std::size_t n = s.dim();
  detail::require_geometry_dim(n);
  if (s.size() < 3) throw Error("verify_linear_bound_geometry: |S| must be at least 3");
  CheckOptions copt;
  copt.tolerance = opt.tolerance;
  if (!check_strong_collapsing(s, copt).passed)
    throw Error("verify_linear_bound_geometry: S does not satisfy the strong collapsing condition");

  LinearBoundGeometryReport rep;
  const NormSpec<T>& norm = s.norm();
  const std::size_t k = s.size() / 3;
  rep.triples = k;
  if (k > kMaxFoldedTriples) throw Error("verify_linear_bound_geometry: too many triples to fold");
  const auto order = detail::partition_order(s.size(), opt);
  for (std::size_t t = 0; t < k; ++t) rep.partition.push_back({order[3 * t], order[3 * t + 1], order[3 * t + 2]});
  rep.leftover.assign(order.begin() + static_cast<std::ptrdiff_t>(3 * k), order.end());

  const T half = T(1) / T(2);
  std::vector<BallUnionRegion<T>> vs;
  bool first = true;
  for (const auto& tri : rep.partition) {
    const Vector<T>& x = s[tri[0]];
    const Vector<T>& y = s[tri[1]];
    const Vector<T>& z = s[tri[2]];
    std::vector<Vector<T>> cs{x, y, z, x + y, x + z, y + z};
    for (std::size_t a = 0; a < cs.size(); ++a)
      for (std::size_t b = a + 1; b < cs.size(); ++b) {
        const T d = evaluate_norm(norm, cs[a] - cs[b]);
        ++rep.disjointness_pairs;
        if (!leq_tol(T(1), d, opt.tolerance)) ++rep.disjointness_failures;
        const double dd = to_double(d);
        if (first || dd < rep.min_center_distance) rep.min_center_distance = dd;
        first = false;
      }
    vs.emplace_back(std::move(cs), half, norm);
  }
  rep.checks.push_back(detail::make_check("disjointness", rep.disjointness_failures == 0,
                                          std::to_string(rep.disjointness_pairs - rep.disjointness_failures) + "/" +
                                              std::to_string(rep.disjointness_pairs) + " centre pairs at distance >= 1"));

  std::vector<BallUnionRegion<double>> vd;
  for (const auto& v : vs) vd.push_back(to_double(v));
  BallUnionRegion<double> folded = vd.front();
  for (std::size_t t = 1; t < vd.size(); ++t) folded = minkowski_sum_regions(folded, vd[t]);

  SamplingOptions sopt;
  sopt.threads = opt.threads;
  rep.containment_radius = 0.5 * static_cast<double>(k) + 1.0;
  rep.containment_samples = samples;
  rep.containment_violations = detail::containment_violations(folded, rep.containment_radius, samples,
                                                              substream_seed(seed, 0), opt.tolerance, sopt);
  rep.checks.push_back(detail::make_check("containment", rep.containment_violations == 0,
                                          std::to_string(rep.containment_violations) + " violations in " +
                                              std::to_string(samples) + " samples"));

  if (k >= 2 && samples >= kMinVolumeSamples) {
    std::vector<VolumeEstimate> parts;
    for (std::size_t t = 0; t < vd.size(); ++t) parts.push_back(mc_volume(vd[t], samples, substream_seed(seed, 1 + t), sopt));
    const VolumeEstimate whole = mc_volume(folded, samples, substream_seed(seed, 1 + vd.size()), sopt);
    rep.brunn_minkowski = detail::brunn_minkowski(whole, parts, n);
    rep.checks.push_back(detail::make_check("brunn-minkowski", rep.brunn_minkowski->passed,
                                            detail::fmt(rep.brunn_minkowski->lhs) + " >= " +
                                                detail::fmt(rep.brunn_minkowski->rhs) + " - 3 * " +
                                                detail::fmt(rep.brunn_minkowski->sigma)));
  }

  rep.bound = 2.0 / (std::pow(6.0, 1.0 / static_cast<double>(n)) - 1.0);
  rep.checks.push_back(detail::make_check("bound", static_cast<double>(k) <= rep.bound,
                                          "k = " + std::to_string(k) + " <= 2/(6^(1/n) - 1) = " + detail::fmt(rep.bound)));

  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const GeometryCheck& c) { return c.passed; });
  return rep;
}

}  // namespace minex
