#pragma once

// Explicit extremal configurations.
//
// hadamard(n) supports n = 2^k * m for m in {1, 12, 20}: Sylvester doubling
// starting from [[1]] or from the stored orders 12 and 20 (Paley type I
// matrices for q = 11 and q = 19).

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "minex/conditions.hpp"
#include "minex/linalg.hpp"
#include "minex/norms.hpp"
#include "minex/scalar.hpp"

namespace minex {

class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kMaxHadamardOrder = 512;
inline constexpr std::size_t kMaxTheorem1Order = 256;

/// Square matrix with +-1 entries and H H^t = n I.
class HadamardMatrix {
 public:
  explicit HadamardMatrix(std::vector<std::vector<int>> entries) : entries_(std::move(entries)) {
    const std::size_t n = entries_.size();
    for (const auto& row : entries_) {
      if (row.size() != n) throw Error("Hadamard matrix must be square");
      for (int v : row)
        if (v != 1 && v != -1) throw Error("Hadamard entries must be +1 or -1");
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        long s = 0;
        for (std::size_t k = 0; k < n; ++k) s += entries_[i][k] * entries_[j][k];
        if (s != (i == j ? static_cast<long>(n) : 0L))
          throw Error("H H^t != n I at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
  }

  std::size_t order() const { return entries_.size(); }
  int operator()(std::size_t i, std::size_t j) const { return entries_[i][j]; }
  const std::vector<std::vector<int>>& entries() const { return entries_; }

  std::vector<int> column(std::size_t j) const {
    std::vector<int> c(order());
    for (std::size_t i = 0; i < order(); ++i) c[i] = entries_[i][j];
    return c;
  }

  /// [[H, H], [H, -H]]
  HadamardMatrix sylvester_double() const {
    const std::size_t n = order();
    std::vector<std::vector<int>> e(2 * n, std::vector<int>(2 * n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        e[i][j] = e[i][j + n] = e[i + n][j] = entries_[i][j];
        e[i + n][j + n] = -entries_[i][j];
      }
    return HadamardMatrix(std::move(e));
  }

 private:
  std::vector<std::vector<int>> entries_;
};

namespace detail {

inline constexpr std::array<std::string_view, 12> kHadamard12 = {
    "++++++++++++", "-++-+++---+-", "--++-+++---+", "-+-++-+++---", "--+-++-+++--", "---+-++-+++-",
    "----+-++-+++", "-+---+-++-++", "-++---+-++-+", "-+++---+-++-", "--+++---+-++", "-+-+++---+-+",
};

inline constexpr std::array<std::string_view, 20> kHadamard20 = {
    "++++++++++++++++++++", "-++--++++-+-+----++-", "--++--++++-+-+----++", "-+-++--++++-+-+----+",
    "-++-++--++++-+-+----", "--++-++--++++-+-+---", "---++-++--++++-+-+--", "----++-++--++++-+-+-",
    "-----++-++--++++-+-+", "-+----++-++--++++-+-", "--+----++-++--++++-+", "-+-+----++-++--++++-",
    "--+-+----++-++--++++", "-+-+-+----++-++--+++", "-++-+-+----++-++--++", "-+++-+-+----++-++--+",
    "-++++-+-+----++-++--", "--++++-+-+----++-++-", "---++++-+-+----++-++", "-+--++++-+-+----++-+",
};

template <std::size_t N>
HadamardMatrix from_literal(const std::array<std::string_view, N>& rows) {
  std::vector<std::vector<int>> e(N, std::vector<int>(N));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) e[i][j] = rows[i][j] == '+' ? 1 : -1;
  return HadamardMatrix(std::move(e));
}

}  // namespace detail

inline bool hadamard_supported(std::size_t n) {
  if (n == 0 || n > kMaxHadamardOrder) return false;
  for (std::size_t seed : {std::size_t{1}, std::size_t{12}, std::size_t{20}}) {
    std::size_t m = seed;
    while (m < n) m *= 2;
    if (m == n) return true;
  }
  return false;
}

/// Hadamard matrix of order n; throws UnsupportedOrder outside 2^k * {1, 12, 20}.
inline HadamardMatrix hadamard(std::size_t n) {
  if (!hadamard_supported(n))
    throw UnsupportedOrder("no Hadamard construction available for order " + std::to_string(n) +
                           " (supported: 2^k * m, m in {1, 12, 20}, up to " + std::to_string(kMaxHadamardOrder) + ")");
  std::size_t base = n;
  while (base % 2 == 0 && base != 12 && base != 20) base /= 2;
  HadamardMatrix h = base == 12   ? detail::from_literal(detail::kHadamard12)
                     : base == 20 ? detail::from_literal(detail::kHadamard20)
                                  : HadamardMatrix(std::vector<std::vector<int>>{{1}});
  while (h.order() < n) h = h.sylvester_double();
  return h;
}

/// S = {+-x_i} in l_1^n with x_i the i-th Hadamard column divided by n,
/// ordered x_1, -x_1, x_2, -x_2, ... Asserts Phi_1(x_i) = 1 and
/// Phi_1(x_i +- x_j) = 1 for i != j.
inline VectorSet<Rational> theorem1_set(std::size_t n) {
  if (n > kMaxTheorem1Order)
    throw UnsupportedOrder("theorem1_set supports orders up to " + std::to_string(kMaxTheorem1Order));
  const HadamardMatrix h = hadamard(n);
  const auto norm = NormSpec<Rational>::l1(n);
  const Rational scale(1, static_cast<long>(n));
  std::vector<Vector<Rational>> half;
  for (std::size_t j = 0; j < n; ++j) {
    Vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = h(i, j) > 0 ? scale : Rational(-scale);
    half.push_back(std::move(x));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (evaluate_norm(norm, half[i]) != 1) throw Error("theorem1_set: column is not a unit vector");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (evaluate_norm(norm, half[i] + half[j]) != 1 || evaluate_norm(norm, half[i] - half[j]) != 1)
        throw Error("theorem1_set: Phi_1(x_i +- x_j) != 1");
    }
  }
  std::vector<Vector<Rational>> s;
  s.reserve(2 * n);
  for (auto& x : half) {
    s.push_back(x);
    s.push_back(-x);
  }
  return VectorSet<Rational>(std::move(s), norm);
}

/// {+-e_i} in l_inf^n, ordered e_1, -e_1, e_2, -e_2, ...
template <Scalar T = Rational>
VectorSet<T> linf_canonical(std::size_t n) {
  if (n == 0) throw Error("linf_canonical: n must be positive");
  std::vector<Vector<T>> s;
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back(Vector<T>::unit(n, i, 1));
    s.push_back(Vector<T>::unit(n, i, -1));
  }
  return VectorSet<T>(std::move(s), NormSpec<T>::linf(n));
}

}  // namespace minex
