#pragma once

// Test-only helpers and independent oracles. Nothing in here calls the code
// path it is used to check.

#include <cstdint>
#include <string>
#include <vector>

#include "minex/conditions.hpp"
#include "minex/linalg.hpp"
#include "minex/norms.hpp"
#include "minex/rng.hpp"

namespace minex::test {

using Q = Rational;
using VQ = Vector<Rational>;
using VD = Vector<double>;

inline Q q(long n, long d = 1) {
  Q r(n, d);
  r.canonicalize();
  return r;
}

inline VQ vq(std::initializer_list<Q> xs) { return VQ(std::vector<Q>(xs)); }

/// l_inf and l_1 straight from the definitions.
template <Scalar T>
T oracle_linf(const Vector<T>& x) {
  T m(0);
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const T a = x[i] < 0 ? T(-x[i]) : x[i];
    if (a > m) m = a;
  }
  return m;
}

template <Scalar T>
T oracle_l1(const Vector<T>& x) {
  T s(0);
  for (std::size_t i = 0; i < x.dim(); ++i) s += x[i] < 0 ? T(-x[i]) : x[i];
  return s;
}

/// Naive strong-collapsing check: visits subsets in the same Gray order as the
/// library but recomputes every subset sum from scratch. Produces a report
/// with the same fields so the two can be compared field by field.
template <Scalar T>
ConditionReport<T> naive_strong_collapsing(const VectorSet<T>& s, double tol = 1e-9) {
  ConditionReport<T> rep;
  rep.condition = Condition::A;
  const std::size_t m = s.size();
  const std::uint64_t total = std::uint64_t{1} << m;
  T best(0);
  for (std::uint64_t k = 0; k < total; ++k) {
    const std::uint64_t g = k ^ (k >> 1);
    Vector<T> sum(s.dim());
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < m; ++i)
      if ((g >> i) & 1) {
        members.push_back(i);
        for (std::size_t c = 0; c < s.dim(); ++c) sum[c] = sum[c] + s[i][c];
      }
    const T norm = evaluate_norm(s.norm(), sum);
    bool ok;
    if constexpr (is_exact_v<T>) {
      ok = norm <= 1;
    } else {
      ok = norm <= 1.0 + tol;
    }
    if (!ok) {
      rep.passed = false;
      rep.subset = members;
      rep.subset_norm = norm;
      rep.subsets_examined = k + 1;
      return rep;
    }
    if (norm > best) best = norm;
  }
  rep.passed = true;
  rep.max_subset_norm = best;
  rep.subsets_examined = total;
  return rep;
}

/// Random centrally symmetric polytope norm with `half` generator points
/// (plus their negatives and the axis points, so the vertices span R^n).
inline NormSpec<double> random_polytopal_norm(std::size_t n, std::size_t half, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<VD> vs;
  for (std::size_t i = 0; i < n; ++i) {
    VD e(n);
    e[i] = 0.5 + 0.5 * rng.uniform();
    vs.push_back(e);
  }
  for (std::size_t k = 0; k < half; ++k) {
    VD v = rng.gaussian(n);
    double s = 0.0;
    for (double c : v) s += c * c;
    v /= std::sqrt(s);
    v *= 0.6 + 0.8 * rng.uniform();
    vs.push_back(v);
  }
  const std::size_t m = vs.size();
  for (std::size_t k = 0; k < m; ++k) vs.push_back(-vs[k]);
  return NormSpec<double>::polytopal(std::move(vs));
}

/// Random invertible rational matrix with small entries.
inline Matrix<Rational> random_invertible_rational(std::size_t n, Rng& rng) {
  for (;;) {
    Matrix<Rational> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = q(rng.range(-5, 5), rng.range(1, 4));
    if (determinant(m) != 0) return m;
  }
}

}  // namespace minex::test
