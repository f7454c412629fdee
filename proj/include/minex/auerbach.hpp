#pragma once

// Auerbach bases by coordinate ascent on |det(b_1..b_n)| over unit vectors.
//
// Replacing b_k by u changes the determinant to <c_k, u>, where c_k is the
// k-th cofactor vector (det * row k of B^{-1}). The best unit u is the dual
// maximizer of sign(det) c_k, and the new |det| is the dual norm of c_k. At a
// fixed point every dual functional f_k has dual norm 1, which gives
// Phi_inf(x) <= Phi(Bx) <= Phi_1(x).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minex/linalg.hpp"
#include "minex/norms.hpp"
#include "minex/parallel.hpp"
#include "minex/rng.hpp"
#include "minex/scalar.hpp"

namespace minex {

template <Scalar T>
struct AuerbachFrame {
  std::vector<Vector<T>> basis;  // b_1..b_n
  std::vector<Vector<T>> duals;  // f_1..f_n, rows of transform^{-1}
  Matrix<T> transform;           // columns b_i
  T det = T(0);
  double log_det = 0.0;
  std::vector<double> det_history;  // |det| after every accepted replacement
  std::size_t restart = 0;
  std::size_t sweeps = 0;

  std::size_t dim() const { return basis.size(); }

  Matrix<T> inverse_transform() const {
    return Matrix<T>::from_rows(std::span<const Vector<T>>(duals));
  }
};

struct AuerbachOptions {
  std::size_t max_sweeps = 1000;
  // floating mode: a replacement must raise |det| by this relative amount
  double min_gain = 1e-12;
  unsigned threads = 0;
};

namespace detail {

template <Scalar T>
bool frame_better(const AuerbachFrame<T>& a, const AuerbachFrame<T>& b) {
  const T da = abs_value(a.det), db = abs_value(b.det);
  if constexpr (is_exact_v<T>) {
    if (da != db) return da > db;
  } else {
    const double scale = std::max(std::fabs(da), std::fabs(db));
    if (std::fabs(da - db) > 1e-12 * scale) return da > db;
  }
  return a.basis < b.basis;
}

template <Scalar T>
std::vector<Vector<T>> initial_basis(const NormSpec<T>& norm, std::size_t restart, std::uint64_t seed) {
  const std::size_t n = norm.dim();
  std::vector<Vector<T>> b;
  if (restart == 0) {
    for (std::size_t i = 0; i < n; ++i) {
      Vector<T> e = Vector<T>::unit(n, i);
      const T s = evaluate_norm(norm, e);
      b.push_back(e / s);
    }
    return b;
  }
  Rng rng(substream_seed(seed, restart));
  for (std::size_t i = 0; i < n; ++i) {
    Vector<T> x(n);
    do {
      if constexpr (is_exact_v<T>) {
        x = rng.cube_point<T>(n, 64);
      } else {
        x = rng.gaussian(n);
      }
    } while (x.is_zero());
    const T s = evaluate_norm(norm, x);
    b.push_back(x / s);
  }
  return b;
}

template <Scalar T>
std::optional<AuerbachFrame<T>> ascend(const NormSpec<T>& norm, std::vector<Vector<T>> basis, std::size_t restart,
                                       const AuerbachOptions& opt) {
  const std::size_t n = norm.dim();
  Matrix<T> b = Matrix<T>::from_columns(std::span<const Vector<T>>(basis));
  T det = determinant(b);
  if (sign_of(det) == 0) return std::nullopt;

  AuerbachFrame<T> f;
  f.restart = restart;
  f.det_history.push_back(std::fabs(to_double(det)));
  for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    bool changed = false;
    for (std::size_t k = 0; k < n; ++k) {
      auto inv = inverse(b);
      if (!inv) throw Error("auerbach: basis became singular");
      Vector<T> c = inv->row(k) * det;
      if (sign_of(det) < 0) c = -c;
      const Vector<T> u = dual_maximizer(norm, c);
      const T gain = dot(c, u);  // |det| after replacing b_k by u
      const T cur = abs_value(det);
      bool better;
      if constexpr (is_exact_v<T>) {
        better = gain > cur;
      } else {
        better = gain > cur * (1.0 + opt.min_gain);
      }
      if (!better) continue;
      for (std::size_t i = 0; i < n; ++i) b(i, k) = u[i];
      basis[k] = u;
      const T next = determinant(b);
      const double prev = f.det_history.back();
      const double now = std::fabs(to_double(next));
      if (now < prev * (1.0 - 1e-12)) throw Error("auerbach: |det| decreased during ascent");
      det = next;
      f.det_history.push_back(now);
      changed = true;
    }
    f.sweeps = sweep + 1;
    if (!changed) break;
  }

  auto inv = inverse(b);
  if (!inv) throw Error("auerbach: final basis is singular");
  f.basis = std::move(basis);
  f.transform = b;
  for (std::size_t i = 0; i < n; ++i) f.duals.push_back(inv->row(i));
  f.det = det;
  f.log_det = std::log(std::fabs(to_double(det)));
  return f;
}

}  // namespace detail

/// Best frame over `restarts` ascents. Restart 0 starts from e_i / Phi(e_i);
/// the others from seeded random unit vectors.
template <Scalar T>
AuerbachFrame<T> compute_auerbach(const NormSpec<T>& norm, std::size_t restarts, std::uint64_t seed,
                                  const AuerbachOptions& opt = {}) {
  if (restarts == 0) throw Error("compute_auerbach: restarts must be at least 1");
  std::vector<std::optional<AuerbachFrame<T>>> frames(restarts);
  parallel_chunks(restarts, resolve_threads(opt.threads), [&](std::size_t r) {
    frames[r] = detail::ascend(norm, detail::initial_basis(norm, r, seed), r, opt);
  });
  std::optional<AuerbachFrame<T>> best;
  for (auto& f : frames) {
    if (!f) continue;
    if (!best || detail::frame_better(*f, *best)) best = std::move(f);
  }
  if (!best) throw Error("compute_auerbach: every restart started from a degenerate basis");
  return *best;
}

struct AuerbachReport {
  bool passed = false;
  std::size_t samples = 0;
  std::size_t lower_violations = 0;  // Phi_inf(x) > Phi(Tx) + tol
  std::size_t upper_violations = 0;  // Phi(Tx) > Phi_1(x) + tol
  double worst_lower_slack = 0.0;    // min of Phi(Tx) - Phi_inf(x)
  double worst_upper_slack = 0.0;    // min of Phi_1(x) - Phi(Tx)
  double basis_unit_deviation = 0.0; // max |Phi(b_i) - 1|
  double dual_norm_deviation = 0.0;  // max |Phi*(f_i) - 1|
  double biorthogonality_error = 0.0;
  std::string diagnosis;
};

/// Checks Phi_inf(x) <= Phi(Tx) <= Phi_1(x) at seeded random x in the cube.
template <Scalar T>
AuerbachReport verify_auerbach(const AuerbachFrame<T>& frame, const NormSpec<T>& norm, std::size_t samples,
                               std::uint64_t seed, double tol = 1e-9) {
  const std::size_t n = norm.dim();
  if (frame.dim() != n || frame.transform.rows() != n) throw DimensionError("auerbach frame and norm differ in dimension");
  AuerbachReport rep;
  rep.samples = samples;

  for (std::size_t i = 0; i < n; ++i) {
    rep.basis_unit_deviation =
        std::max(rep.basis_unit_deviation, std::fabs(to_double(evaluate_norm(norm, frame.basis[i])) - 1.0));
    rep.dual_norm_deviation =
        std::max(rep.dual_norm_deviation, std::fabs(to_double(dual_norm(norm, frame.duals[i])) - 1.0));
    for (std::size_t j = 0; j < n; ++j) {
      const double d = to_double(dot(frame.duals[i], frame.basis[j])) - (i == j ? 1.0 : 0.0);
      rep.biorthogonality_error = std::max(rep.biorthogonality_error, std::fabs(d));
    }
  }

  Rng rng(seed);
  bool first = true;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector<T> x = rng.cube_point<T>(n);
    T lo(0), hi(0);
    for (std::size_t i = 0; i < n; ++i) {
      const T a = abs_value(x[i]);
      if (a > lo) lo = a;
      hi += a;
    }
    const T phi = evaluate_norm(norm, frame.transform * x);
    if (!leq_tol(lo, phi, tol)) ++rep.lower_violations;
    if (!leq_tol(phi, hi, tol)) ++rep.upper_violations;
    const double ls = to_double(phi) - to_double(lo), us = to_double(hi) - to_double(phi);
    if (first || ls < rep.worst_lower_slack) rep.worst_lower_slack = ls;
    if (first || us < rep.worst_upper_slack) rep.worst_upper_slack = us;
    first = false;
  }

  rep.passed = rep.lower_violations == 0 && rep.upper_violations == 0;
  if (rep.passed) {
    rep.diagnosis = "sandwich inequality holds at every sample";
  } else if (rep.upper_violations > 0 && rep.basis_unit_deviation > tol) {
    rep.diagnosis = "upper bound fails: some basis vector is not a unit vector";
  } else if (rep.lower_violations > 0 && rep.dual_norm_deviation > tol) {
    rep.diagnosis = rep.basis_unit_deviation > tol ? "lower bound fails: basis vectors are not unit vectors"
                                                   : "lower bound fails: some dual functional has dual norm above 1";
  } else {
    rep.diagnosis = "sandwich inequality violated";
  }
  return rep;
}

}  // namespace minex
