#pragma once

// Executable certificates for the extremal cases: the l_inf isometry
// pipeline for |S| = 2n under (A), equilateral subset-sum sets, sign-pattern
// and pigeonhole bounds, separation constants, and the closed-form bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minex/conditions.hpp"
#include "minex/linalg.hpp"
#include "minex/norms.hpp"
#include "minex/rng.hpp"
#include "minex/scalar.hpp"

namespace minex {

inline constexpr std::size_t kMaxSubsetSumHalf = 16;

/// All 2^n subset sums of `half`, entry k being the sum over the bits of k.
template <Scalar T>
std::vector<Vector<T>> subset_sum_set(const std::vector<Vector<T>>& half, std::size_t dim) {
  if (half.size() > kMaxSubsetSumHalf)
    throw Error("subset_sum_set: at most " + std::to_string(kMaxSubsetSumHalf) + " vectors");
  std::vector<Vector<T>> out;
  out.reserve(std::size_t{1} << half.size());
  out.push_back(Vector<T>(dim));
  for (std::size_t i = 0; i < half.size(); ++i) {
    if (half[i].dim() != dim) throw DimensionError("subset_sum_set: dimension mismatch");
    const std::size_t m = out.size();
    for (std::size_t k = 0; k < m; ++k) out.push_back(out[k] + half[i]);
  }
  return out;
}

template <Scalar T>
std::vector<Vector<T>> subset_sum_set(const std::vector<Vector<T>>& half) {
  if (half.empty()) throw Error("subset_sum_set: pass the dimension for an empty half-set");
  return subset_sum_set(half, half.front().dim());
}

template <Scalar T>
struct EquilateralReport {
  bool passed = false;
  std::size_t points = 0;
  std::uint64_t pairs_checked = 0;
  std::optional<std::pair<std::size_t, std::size_t>> worst_pair;
  std::optional<T> worst_distance;  // distance farthest from 1
  bool petty_case = false;          // 2^n points, all at distance 1
  std::string note;
};

/// Pass iff every pairwise distance is 1 (exactly, or within tol in floating mode).
template <Scalar T>
EquilateralReport<T> check_equilateral(const std::vector<Vector<T>>& points, const NormSpec<T>& norm,
                                       double tol = 1e-9) {
  EquilateralReport<T> rep;
  rep.points = points.size();
  rep.passed = true;
  double worst_gap = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const T d = evaluate_norm(norm, points[i] - points[j]);
      ++rep.pairs_checked;
      const double gap = std::fabs(to_double(d) - 1.0);
      if (!eq_tol(d, T(1), tol)) rep.passed = false;
      if (gap > worst_gap) {
        worst_gap = gap;
        rep.worst_pair = {i, j};
        rep.worst_distance = d;
      }
    }
  const std::size_t n = norm.dim();
  if (rep.passed && n < 63 && points.size() == (std::size_t{1} << n)) {
    rep.petty_case = true;
    rep.note = "2^n points pairwise at distance 1: by Petty's theorem the space is linearly isometric to l_inf^n";
  }
  return rep;
}

enum class IsometryVerdict { certified_exact, certified_sampled, refuted };

inline const char* verdict_name(IsometryVerdict v) {
  switch (v) {
    case IsometryVerdict::certified_exact: return "certified-exact";
    case IsometryVerdict::certified_sampled: return "certified-sampled";
    case IsometryVerdict::refuted: return "refuted";
  }
  return "?";
}

inline const char* isometry_stage_name(int stage) {
  switch (stage) {
    case 0: return "precondition";
    case 1: return "balancing";
    case 2: return "antipodal-pairing";
    case 3: return "independence";
    case 4: return "equilateral";
    case 5: return "isometry";
  }
  return "?";
}

template <Scalar T>
struct IsometryCertificate {
  IsometryVerdict verdict = IsometryVerdict::refuted;
  int stage = 0;  // last stage reached; for a refutation, the failing stage
  std::string message;
  std::vector<std::pair<std::size_t, std::size_t>> pairing;  // (index of x_i, index of -x_i)
  std::vector<Vector<T>> half;                               // x_1..x_n
  std::optional<Matrix<T>> map;                              // M with M x_i = e_i
  std::optional<T> residual;                                 // worst discrepancy of the isometry check
  std::optional<EquilateralReport<T>> equilateral;
  std::optional<std::vector<std::size_t>> witness_subset;    // stage 0: violating subset
  std::size_t samples = 0;                                   // sampled verification only
};

struct IsometryOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
};

/// Equality-case pipeline: |S| = 2n with (A) forces S = {+-x_i}, the subset
/// sums of the x_i to be equilateral, and x_i -> e_i to be an isometry onto
/// l_inf^n. Each stage either passes or refutes with a stage tag.
template <Scalar T>
IsometryCertificate<T> detect_linf_isometry(const VectorSet<T>& s, const IsometryOptions& opt = {}) {
  IsometryCertificate<T> cert;
  const std::size_t n = s.dim();
  const NormSpec<T>& norm = s.norm();
  auto refute = [&](int stage, std::string msg) {
    cert.verdict = IsometryVerdict::refuted;
    cert.stage = stage;
    cert.message = std::move(msg);
    return cert;
  };

  if (s.size() != 2 * n) return refute(0, "|S| = " + std::to_string(s.size()) + " but 2n = " + std::to_string(2 * n));
  CheckOptions copt;
  copt.tolerance = opt.tolerance;
  const auto a = check_strong_collapsing(s, copt);
  if (!a.passed) {
    cert.witness_subset = a.subset;
    return refute(0, "S does not satisfy the strong collapsing condition");
  }

  cert.stage = 1;
  if (!check_strong_balancing(s, copt).passed) return refute(1, "the elements of S do not sum to zero");

  cert.stage = 2;
  std::vector<bool> used(s.size(), false);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (used[i]) continue;
    const Vector<T> neg = -s[i];
    std::optional<std::size_t> partner;
    for (std::size_t j = i + 1; j < s.size() && !partner; ++j)
      if (!used[j] && approx_equal(s[j], neg, 1e-12)) partner = j;
    if (!partner) return refute(2, "element " + std::to_string(i) + " has no antipode in S");
    used[i] = used[*partner] = true;
    cert.pairing.emplace_back(i, *partner);
    cert.half.push_back(s[i]);
  }

  cert.stage = 3;
  const Matrix<T> x = Matrix<T>::from_columns(std::span<const Vector<T>>(cert.half));
  const auto inv = inverse(x);
  if (!inv) return refute(3, "x_1..x_n are linearly dependent");
  cert.map = *inv;

  cert.stage = 4;
  cert.equilateral = check_equilateral(subset_sum_set(cert.half, n), norm, opt.tolerance);
  if (!cert.equilateral->passed) return refute(4, "subset sums of x_1..x_n are not equilateral at distance 1");

  cert.stage = 5;
  const Matrix<T>& m = *cert.map;
  if constexpr (is_exact_v<T>) {
    if (norm.polytope_class()) {
      if (auto vs = unit_ball_vertices(norm)) {
        // B_Phi inside M^-1 B_inf: Phi_inf(M v) <= 1 at the listed vertices;
        // M^-1 B_inf inside B_Phi: Phi(M^-1 s) <= 1 at the cube vertices.
        const auto cube = unit_ball_vertices(NormSpec<T>::linf(n));
        if (cube) {
          T worst(0);
          for (const auto& v : *vs) {
            const Vector<T> w = m * v;
            T linf(0);
            for (const auto& c : w)
              if (abs_value(c) > linf) linf = abs_value(c);
            if (linf - 1 > worst) worst = linf - 1;
          }
          for (const auto& c : *cube) {
            const T phi = evaluate_norm(norm, x * c);
            if (phi - 1 > worst) worst = phi - 1;
          }
          cert.residual = worst;
          if (worst != 0) return refute(5, "unit balls differ: residual " + to_string(worst));
          cert.verdict = IsometryVerdict::certified_exact;
          cert.message = "unit ball of Phi equals M^-1 applied to the cube";
          return cert;
        }
      }
    }
  }

  // sampled fallback: |Phi(y) - Phi_inf(M y)| at seeded points of the cube
  Rng rng(opt.seed);
  double worst = 0.0;
  for (std::size_t k = 0; k < opt.samples; ++k) {
    const Vector<T> y = rng.cube_point<T>(n);
    const Vector<T> w = m * y;
    double linf = 0.0;
    for (const auto& c : w) linf = std::max(linf, std::fabs(to_double(c)));
    worst = std::max(worst, std::fabs(to_double(evaluate_norm(norm, y)) - linf));
  }
  cert.samples = opt.samples;
  cert.residual = T(worst);
  if (worst > opt.tolerance) return refute(5, "sampled isometry check failed");
  cert.verdict = IsometryVerdict::certified_sampled;
  cert.message = "Phi(y) = Phi_inf(M y) at every sample";
  return cert;
}

/// Separation constant for l_p^n: an upper bound on
/// min { Phi_p(x - y) : Phi_p(x) = Phi_p(y) = 1, Phi_p(x + y) <= 1 }
/// from multi-start compass search. Infeasible trial points are pulled back
/// to the constraint boundary along y -> -x.
struct SeparationResult {
  double value = std::numeric_limits<double>::infinity();
  Vector<double> x, y;
  std::size_t restarts = 0;
  std::uint64_t evaluations = 0;
};

namespace detail {

class SeparationProblem {
 public:
  explicit SeparationProblem(const NormSpec<double>& norm) : norm_(norm) {}

  Vector<double> unit(const Vector<double>& v) const { return v / evaluate_norm(norm_, v); }

  // feasible unit pair for parameters (u, v)
  std::pair<Vector<double>, Vector<double>> pair(const Vector<double>& u, const Vector<double>& v) const {
    const Vector<double> x = unit(u);
    Vector<double> y = unit(v);
    if (feasible(x, y)) return {x, y};
    const Vector<double> target = -x;
    double lo = 0.0, hi = 1.0;  // hi is feasible (y = -x)
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Vector<double> cand = blend(y, target, mid);
      if (cand.is_zero() || !feasible(x, unit(cand))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const Vector<double> b = blend(y, target, hi);
    return {x, b.is_zero() ? target : unit(b)};
  }

  double objective(const Vector<double>& u, const Vector<double>& v) {
    ++evaluations;
    if (u.is_zero() || v.is_zero()) return std::numeric_limits<double>::infinity();
    const auto [x, y] = pair(u, v);
    return evaluate_norm(norm_, x - y);
  }

  std::uint64_t evaluations = 0;

 private:
  static Vector<double> blend(const Vector<double>& a, const Vector<double>& b, double t) {
    return a * (1.0 - t) + b * t;
  }
  bool feasible(const Vector<double>& x, const Vector<double>& y) const {
    return evaluate_norm(norm_, x + y) <= 1.0;
  }

  const NormSpec<double>& norm_;
};

}  // namespace detail

inline constexpr std::uint64_t kMaxPollEvaluations = 200000;

inline SeparationResult min_difference_norm(const Rational& p, std::size_t n, std::uint64_t seed,
                                            std::size_t restarts = 64) {
  if (p <= 1) throw Error("min_difference_norm: p must exceed 1");
  if (n < 2) throw Error("min_difference_norm: n must be at least 2");
  if (restarts == 0) throw Error("min_difference_norm: restarts must be at least 1");
  const auto norm = NormSpec<double>::lp(p, n);
  detail::SeparationProblem prob(norm);
  SeparationResult best;
  best.restarts = restarts;
  const std::size_t dim = 2 * n;

  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(substream_seed(seed, r));
    Vector<double> z(dim);
    {
      const Vector<double> u = rng.gaussian(n);
      const Vector<double> v = u * -1.0 + rng.gaussian(n) * rng.uniform(0.2, 2.0);
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = u[i];
        z[n + i] = v[i];
      }
    }
    auto split = [&](const Vector<double>& w) {
      Vector<double> u(n), v(n);
      for (std::size_t i = 0; i < n; ++i) {
        u[i] = w[i];
        v[i] = w[n + i];
      }
      return std::pair{u, v};
    };
    auto f = [&](const Vector<double>& w) {
      const auto [u, v] = split(w);
      return prob.objective(u, v);
    };

    double fz = f(z);
    double step = 0.5;
    std::uint64_t evals = 0;
    while (step > 1e-9 && evals < kMaxPollEvaluations) {
      // coordinate directions plus a few random ones per poll
      std::vector<Vector<double>> dirs;
      for (std::size_t i = 0; i < dim; ++i) {
        dirs.push_back(Vector<double>::unit(dim, i, 1));
        dirs.push_back(Vector<double>::unit(dim, i, -1));
      }
      for (int k = 0; k < 4; ++k) {
        Vector<double> d = rng.gaussian(dim);
        double s = 0.0;
        for (double c : d) s += c * c;
        d /= std::sqrt(s);
        dirs.push_back(d);
        dirs.push_back(-d);
      }
      bool improved = false;
      for (const auto& d : dirs) {
        const Vector<double> trial = z + d * step;
        const double ft = f(trial);
        ++evals;
        if (ft < fz - 1e-4 * step * step) {
          z = trial;
          fz = ft;
          improved = true;
          break;
        }
      }
      step = improved ? std::min(2.0 * step, 1.0) : 0.5 * step;
    }
    if (fz < best.value) {
      const auto [u, v] = split(z);
      const auto [x, y] = prob.pair(u, v);
      best.value = fz;
      best.x = x;
      best.y = y;
    }
  }
  best.evaluations = prob.evaluations;
  return best;
}

/// Separation constant quoted for l_p: 3^{1/p} for p >= 2, (2^p - 1)^{1/p} for 1 < p < 2.
inline double separation_constant(const Rational& p) {
  if (p <= 1) throw Error("separation constant needs p > 1");
  const double pd = p.get_d();
  return p >= 2 ? std::pow(3.0, 1.0 / pd) : std::pow(std::pow(2.0, pd) - 1.0, 1.0 / pd);
}

struct SignPatternReport {
  bool passed = true;
  std::vector<std::string> patterns;           // '+', '-', '0' per coordinate
  std::vector<std::size_t> zero_coordinate;    // vectors outside the argument's hypothesis
  std::optional<std::pair<std::size_t, std::size_t>> duplicate;  // two zero-free vectors sharing a pattern
  std::optional<double> duplicate_sum_norm;
  std::size_t zero_free = 0;
  bool bound_holds = true;  // zero-free count <= 2^n
  std::string note;
};

/// Distinct sign patterns among zero-free vectors of an l_1 set. Vectors with
/// a zero coordinate are flagged, never assigned a sign.
template <Scalar T>
SignPatternReport l1_sign_pattern_check(const VectorSet<T>& s, double zero_tol = 1e-12) {
  if (!s.norm().is_l1()) throw Error("l1_sign_pattern_check needs the l_1 norm, got " + s.norm().describe());
  SignPatternReport rep;
  const std::size_t n = s.dim();
  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::string pat;
    bool has_zero = false;
    for (std::size_t c = 0; c < n; ++c) {
      const bool zero = is_zero_tol(s[i][c], zero_tol);
      has_zero = has_zero || zero;
      pat += zero ? '0' : (sign_of(s[i][c]) > 0 ? '+' : '-');
    }
    rep.patterns.push_back(pat);
    if (has_zero) {
      rep.zero_coordinate.push_back(i);
    } else {
      free_idx.push_back(i);
    }
  }
  rep.zero_free = free_idx.size();
  for (std::size_t a = 0; a < free_idx.size() && !rep.duplicate; ++a)
    for (std::size_t b = a + 1; b < free_idx.size(); ++b)
      if (rep.patterns[free_idx[a]] == rep.patterns[free_idx[b]]) {
        rep.duplicate = {free_idx[a], free_idx[b]};
        rep.duplicate_sum_norm = to_double(evaluate_norm(s.norm(), s[free_idx[a]] + s[free_idx[b]]));
        break;
      }
  rep.passed = !rep.duplicate;
  rep.bound_holds = n >= 63 || rep.zero_free <= (std::size_t{1} << n);
  if (rep.duplicate) {
    rep.note = "two zero-free vectors share a sign pattern, so their sum has l_1 norm 2";
  } else if (!rep.zero_coordinate.empty() && rep.zero_free == 0) {
    rep.note = "every vector has a zero coordinate; the sign-pattern argument does not apply";
  } else {
    rep.note = "zero-free sign patterns are distinct, so at most 2^n zero-free vectors";
  }
  return rep;
}

struct PigeonholeSlot {
  std::size_t coordinate = 0;
  int sign = 1;
  bool operator==(const PigeonholeSlot&) const = default;
};

struct PigeonholeReport {
  bool passed = true;
  std::vector<std::optional<PigeonholeSlot>> assignment;  // first extreme slot of each vector
  std::optional<PigeonholeSlot> collision;
  std::optional<std::pair<std::size_t, std::size_t>> colliding;
  std::optional<double> colliding_sum_norm;
  std::size_t slots_used = 0;
  std::string note;
};

/// Pass iff no signed coordinate slot (i, +-) holds two vectors with
/// x(i) = +-1. The first extreme slot of each vector is the injection S -> slots.
template <Scalar T>
PigeonholeReport linf_pigeonhole_check(const VectorSet<T>& s, double tol = 1e-9) {
  if (s.norm().kind() != NormKind::linf)
    throw Error("linf_pigeonhole_check needs the l_inf norm, got " + s.norm().describe());
  PigeonholeReport rep;
  const std::size_t n = s.dim();
  std::vector<std::vector<std::size_t>> owners(2 * n);
  for (std::size_t v = 0; v < s.size(); ++v) {
    std::optional<PigeonholeSlot> first;
    for (std::size_t c = 0; c < n; ++c) {
      bool extreme;
      if constexpr (is_exact_v<T>) {
        extreme = abs_value(s[v][c]) == 1;
      } else {
        extreme = std::fabs(s[v][c]) >= 1.0 - tol;
      }
      if (!extreme) continue;
      const int sg = sign_of(s[v][c]) > 0 ? 1 : -1;
      if (!first) first = PigeonholeSlot{c, sg};
      auto& own = owners[2 * c + (sg > 0 ? 0 : 1)];
      if (!own.empty() && !rep.collision) {
        rep.collision = PigeonholeSlot{c, sg};
        rep.colliding = {own.front(), v};
        rep.colliding_sum_norm = to_double(evaluate_norm(s.norm(), s[own.front()] + s[v]));
      }
      own.push_back(v);
    }
    rep.assignment.push_back(first);
  }
  for (const auto& o : owners)
    if (!o.empty()) ++rep.slots_used;
  rep.passed = !rep.collision;
  rep.note = rep.passed ? "each signed coordinate slot holds at most one vector, so |S| <= 2n"
                        : "two vectors share an extreme signed coordinate, so their sum has l_inf norm 2";
  return rep;
}

struct SeparationBound {
  Rational p;
  double r = 0.0;
  double bound = 0.0;  // 2 (1 + 1/r)^n + 1
};

struct BoundTable {
  std::size_t n = 0;
  double bound_A = 0.0;          // 2n
  double bound_Aprime = 0.0;     // 2^{n+1}
  double bound_linear_A = 0.0;   // 6 / (6^{1/n} - 1) + 2
  double linear_cap = 0.0;       // (6 / ln 6) n
  bool linear_comparison = false;
  std::vector<SeparationBound> r_values;
  double bound_l1 = 0.0;         // 2^n
  double bound_l2 = 3.0;
  double bound_linf = 0.0;       // 2n
};

inline BoundTable bound_table(std::size_t n, const std::vector<Rational>& p_list = {}) {
  if (n == 0) throw Error("bound_table: n must be positive");
  BoundTable t;
  const double nd = static_cast<double>(n);
  t.n = n;
  t.bound_A = 2.0 * nd;
  t.bound_Aprime = std::ldexp(1.0, static_cast<int>(n) + 1);
  t.bound_linear_A = 6.0 / (std::pow(6.0, 1.0 / nd) - 1.0) + 2.0;
  t.linear_cap = 6.0 / std::log(6.0) * nd;
  t.linear_comparison = t.bound_linear_A < t.linear_cap;
  if (!t.linear_comparison) throw Error("bound_table: 6/(6^{1/n}-1)+2 < (6/ln 6)n fails numerically");
  t.bound_l1 = std::ldexp(1.0, static_cast<int>(n));
  t.bound_linf = 2.0 * nd;
  for (const auto& p : p_list) {
    SeparationBound b;
    b.p = p;
    b.r = separation_constant(p);
    b.bound = 2.0 * std::pow(1.0 + 1.0 / b.r, nd) + 1.0;
    t.r_values.push_back(b);
  }
  return t;
}

}  // namespace minex
