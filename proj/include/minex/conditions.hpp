#pragma once

// The collapsing and balancing conditions for a finite set S of unit vectors:
//
//   (A)   Phi(sum of J) <= 1 for every J subset of S      strong collapsing
//   (A')  Phi(x + y) <= 1 for distinct x, y in S          weak collapsing
//   (B)   sum of S = 0                                    strong balancing
//   (B')  0 in the relative interior of conv(S)           weak balancing
//
// Every check returns a report with a witness that can be re-verified
// independently: the violating subset, the offending pair, the sum vector,
// or the convex coefficients / separating functional.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "minex/linalg.hpp"
#include "minex/norms.hpp"
#include "minex/parallel.hpp"
#include "minex/scalar.hpp"
#include "minex/simplex.hpp"

namespace minex {

/// Finite set of distinct unit vectors with its norm.
template <Scalar T>
class VectorSet {
 public:
  VectorSet(std::vector<Vector<T>> vectors, NormSpec<T> norm, double unit_tolerance = 1e-9)
      : vectors_(std::move(vectors)), norm_(std::move(norm)), unit_tolerance_(unit_tolerance) {
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      if (vectors_[i].dim() != norm_.dim())
        throw DimensionError("vector " + std::to_string(i) + " has dimension " + std::to_string(vectors_[i].dim()) +
                             ", norm has " + std::to_string(norm_.dim()));
      if (!is_unit(norm_, vectors_[i], unit_tolerance_))
        throw Error("vector " + std::to_string(i) + " is not a unit vector (norm " +
                    std::to_string(to_double(evaluate_norm(norm_, vectors_[i]))) + ")");
      for (std::size_t j = 0; j < i; ++j)
        if (approx_equal(vectors_[i], vectors_[j], is_exact_v<T> ? 0.0 : 1e-12))
          throw Error("vectors " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
    }
  }

  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }
  std::size_t dim() const { return norm_.dim(); }
  const Vector<T>& operator[](std::size_t i) const { return vectors_[i]; }
  const std::vector<Vector<T>>& vectors() const { return vectors_; }
  const NormSpec<T>& norm() const { return norm_; }
  double unit_tolerance() const { return unit_tolerance_; }
  static constexpr ScalarMode mode() { return scalar_traits<T>::mode; }

  VectorSet subset(const std::vector<std::size_t>& indices) const {
    std::vector<Vector<T>> vs;
    vs.reserve(indices.size());
    for (auto i : indices) vs.push_back(vectors_.at(i));
    return VectorSet(std::move(vs), norm_, unit_tolerance_);
  }

 private:
  std::vector<Vector<T>> vectors_;
  NormSpec<T> norm_;
  double unit_tolerance_;
};

template <Scalar T>
VectorSet<double> to_double(const VectorSet<T>& s) {
  std::vector<Vector<double>> vs;
  vs.reserve(s.size());
  for (const auto& x : s.vectors()) vs.push_back(to_double(x));
  return VectorSet<double>(std::move(vs), to_double(s.norm()), s.unit_tolerance());
}

enum class Condition { A, A_prime, B, B_prime };

inline const char* condition_name(Condition c) {
  switch (c) {
    case Condition::A: return "A";
    case Condition::A_prime: return "A'";
    case Condition::B: return "B";
    case Condition::B_prime: return "B'";
  }
  return "?";
}

inline Condition parse_condition(std::string_view s) {
  if (s == "A") return Condition::A;
  if (s == "A'" || s == "Aprime" || s == "A_prime") return Condition::A_prime;
  if (s == "B") return Condition::B;
  if (s == "B'" || s == "Bprime" || s == "B_prime") return Condition::B_prime;
  throw Error("unknown condition '" + std::string(s) + "' (expected A, A', B or B')");
}

template <Scalar T>
struct ConditionReport {
  Condition condition = Condition::A;
  bool passed = false;
  // (A), (A') failure: violating index subset (ascending) and the norm of its sum.
  std::vector<std::size_t> subset;
  std::optional<T> subset_norm;
  // (A) pass: largest subset-sum norm seen. (A') pass: largest pair-sum norm.
  std::optional<T> max_subset_norm;
  std::uint64_t subsets_examined = 0;
  // (B): the sum of S and its norm.
  std::optional<Vector<T>> sum;
  std::optional<T> sum_norm;
  // (B'): optimal margin delta and convex coefficients lambda (sum 1, lambda_i >= delta).
  std::optional<T> delta;
  std::vector<T> coefficients;
  // (B') infeasibility certificate: w with <w, x> = 1 for every x in S.
  std::optional<Vector<T>> separating_functional;
  std::string note;

  bool operator==(const ConditionReport&) const = default;
};

struct CheckOptions {
  double tolerance = 1e-9;
  std::size_t enumeration_guard = 30;
  unsigned threads = 0;
  std::uint64_t chunk_size = std::uint64_t{1} << 16;
};

inline std::uint64_t gray_code(std::uint64_t k) { return k ^ (k >> 1); }

inline std::vector<std::size_t> bits_of(std::uint64_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) out.push_back(i);
  return out;
}

/// (A) by Gray-code enumeration of all 2^|S| subsets, one vector update per
/// step. The subset sequence is split into fixed-size chunks, each starting
/// from a freshly computed sum, so results do not depend on the worker count.
/// On failure the witness is the first violating subset in Gray order.
template <Scalar T>
ConditionReport<T> check_strong_collapsing(const VectorSet<T>& s, const CheckOptions& opt = {}) {
  const std::size_t m = s.size();
  if (m > opt.enumeration_guard || m >= 63)
    throw Error("strong collapsing check: |S| = " + std::to_string(m) + " exceeds the enumeration guard of " +
                std::to_string(opt.enumeration_guard));
  const std::uint64_t total = std::uint64_t{1} << m;
  const std::uint64_t chunk = std::max<std::uint64_t>(1, std::min(opt.chunk_size, total));
  const std::size_t chunks = static_cast<std::size_t>((total + chunk - 1) / chunk);
  const T one(1);

  struct ChunkResult {
    std::optional<std::uint64_t> violation;
    T violation_norm = T(0);
    T max_norm = T(0);
  };
  std::vector<ChunkResult> results(chunks);
  std::atomic<std::uint64_t> first_violation{std::numeric_limits<std::uint64_t>::max()};

  parallel_chunks(chunks, resolve_threads(opt.threads), [&](std::size_t c) {
    const std::uint64_t lo = c * chunk;
    const std::uint64_t hi = std::min(total, lo + chunk);
    if (lo >= first_violation.load()) return;
    std::uint64_t g = gray_code(lo);
    Vector<T> sum(s.dim());
    for (auto i : bits_of(g)) sum += s[i];
    ChunkResult& r = results[c];
    for (std::uint64_t k = lo; k < hi; ++k) {
      if (k > lo) {
        const int bit = std::countr_zero(k);
        const std::uint64_t flip = std::uint64_t{1} << bit;
        g ^= flip;
        if (g & flip) {
          sum += s[bit];
        } else {
          sum -= s[bit];
        }
      }
      const T norm = evaluate_norm(s.norm(), sum);
      if (!leq_tol(norm, one, opt.tolerance)) {
        r.violation = k;
        r.violation_norm = norm;
        std::uint64_t cur = first_violation.load();
        while (k < cur && !first_violation.compare_exchange_weak(cur, k)) {
        }
        return;
      }
      if (norm > r.max_norm) r.max_norm = norm;
    }
  });

  ConditionReport<T> rep;
  rep.condition = Condition::A;
  const std::uint64_t fv = first_violation.load();
  if (fv != std::numeric_limits<std::uint64_t>::max()) {
    const ChunkResult& r = results[static_cast<std::size_t>(fv / chunk)];
    rep.passed = false;
    rep.subset = bits_of(gray_code(fv));
    rep.subset_norm = r.violation_norm;
    rep.subsets_examined = fv + 1;
    return rep;
  }
  T best(0);
  for (const auto& r : results)
    if (r.max_norm > best) best = r.max_norm;
  rep.passed = true;
  rep.max_subset_norm = best;
  rep.subsets_examined = total;
  return rep;
}

/// (A') by a scan of all pairs i < j in lexicographic order.
template <Scalar T>
ConditionReport<T> check_weak_collapsing(const VectorSet<T>& s, const CheckOptions& opt = {}) {
  ConditionReport<T> rep;
  rep.condition = Condition::A_prime;
  const T one(1);
  T best(0);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const T norm = evaluate_norm(s.norm(), s[i] + s[j]);
      ++rep.subsets_examined;
      if (!leq_tol(norm, one, opt.tolerance)) {
        rep.passed = false;
        rep.subset = {i, j};
        rep.subset_norm = norm;
        return rep;
      }
      if (norm > best) best = norm;
    }
  rep.passed = true;
  rep.max_subset_norm = best;
  return rep;
}

/// (B): the elements sum to zero (floating: the sum has norm <= tolerance).
template <Scalar T>
ConditionReport<T> check_strong_balancing(const VectorSet<T>& s, const CheckOptions& opt = {}) {
  ConditionReport<T> rep;
  rep.condition = Condition::B;
  Vector<T> sum(s.dim());
  for (const auto& x : s.vectors()) sum += x;
  const T norm = evaluate_norm(s.norm(), sum);
  rep.sum = sum;
  rep.sum_norm = norm;
  if constexpr (is_exact_v<T>) {
    rep.passed = sum.is_zero();
  } else {
    rep.passed = norm <= opt.tolerance;
  }
  return rep;
}

/// (B'): maximize delta subject to sum(lambda_i x_i) = 0, sum(lambda_i) = 1,
/// lambda_i >= delta, with the equations restricted to the span of S. Passes
/// iff the optimum delta is positive. When 0 is not even in the affine hull
/// the report carries w with <w, x> = 1 on S instead.
template <Scalar T>
ConditionReport<T> check_weak_balancing(const VectorSet<T>& s, const CheckOptions& opt = {}) {
  if (s.empty()) throw Error("weak balancing check needs a nonempty set");
  ConditionReport<T> rep;
  rep.condition = Condition::B_prime;
  const std::size_t m = s.size();

  // 0 outside the affine hull iff some w has <w, x_i> = 1 for all i.
  {
    Matrix<T> rows = Matrix<T>::from_rows(std::span<const Vector<T>>(s.vectors()));
    Vector<T> ones(m);
    for (std::size_t i = 0; i < m; ++i) ones[i] = T(1);
    if (auto w = solve(rows, ones)) {
      rep.passed = false;
      rep.separating_functional = *w;
      rep.note = "0 is not in the affine hull of S";
      return rep;
    }
  }

  // Independent rows of X (columns x_i) describe the same equations within span(S).
  Matrix<T> x = Matrix<T>::from_columns(std::span<const Vector<T>>(s.vectors()));
  const auto pivots = rref(x);
  const std::size_t r = pivots.size();

  // Variables: mu_1..mu_m, delta+, delta-; lambda_i = mu_i + delta+ - delta-.
  const std::size_t k = m + 2;
  Matrix<T> a(r + 1, k);
  Vector<T> b(r + 1);
  for (std::size_t row = 0; row < r; ++row) {
    T rs(0);
    for (std::size_t i = 0; i < m; ++i) {
      a(row, i) = x(row, i);
      rs += x(row, i);
    }
    a(row, m) = rs;
    a(row, m + 1) = -rs;
  }
  for (std::size_t i = 0; i < m; ++i) a(r, i) = T(1);
  a(r, m) = T(static_cast<long>(m));
  a(r, m + 1) = T(-static_cast<long>(m));
  b[r] = T(1);
  Vector<T> c(k);
  c[m] = T(-1);
  c[m + 1] = T(1);

  const auto lp = solve_lp(a, b, c);
  if (lp.status != LpStatus::optimal) {
    rep.passed = false;
    rep.note = "balancing linear program did not reach an optimum";
    return rep;
  }
  const T delta = lp.x[m] - lp.x[m + 1];
  rep.delta = delta;
  rep.coefficients.reserve(m);
  for (std::size_t i = 0; i < m; ++i) rep.coefficients.push_back(T(lp.x[i] + delta));
  if constexpr (is_exact_v<T>) {
    rep.passed = sgn(delta) > 0;
  } else {
    rep.passed = delta > opt.tolerance;
  }
  if (!rep.passed) rep.note = "0 is in the affine hull but not in the relative interior of conv(S)";
  return rep;
}

template <Scalar T>
ConditionReport<T> check_condition(Condition c, const VectorSet<T>& s, const CheckOptions& opt = {}) {
  switch (c) {
    case Condition::A: return check_strong_collapsing(s, opt);
    case Condition::A_prime: return check_weak_collapsing(s, opt);
    case Condition::B: return check_strong_balancing(s, opt);
    case Condition::B_prime: return check_weak_balancing(s, opt);
  }
  throw Error("unknown condition");
}

}  // namespace minex
