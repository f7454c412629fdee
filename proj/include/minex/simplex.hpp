#pragma once

// Small dense two-phase simplex for
//
//     minimize  c^T x   subject to  A x = b,  x >= 0.
//
// Bland's rule is used for both entering and leaving variables, so the method
// terminates without cycling; in exact mode every pivot is a rational
// operation and the optimum is exact. Sizes targeted here are tiny (tens of
// rows, a few hundred columns).

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "minex/linalg.hpp"
#include "minex/scalar.hpp"

namespace minex {

enum class LpStatus { optimal, infeasible, unbounded };

template <Scalar T>
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  T objective = T(0);
  Vector<T> x;
};

namespace detail {

template <Scalar T>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), T(0)) {}

  T& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  const T& at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  T& rhs(std::size_t r) { return at(r, cols_); }
  // Objective row lives at index rows_.
  T& cost(std::size_t c) { return at(rows_, c); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const T inv = T(1) / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c)
      if (sign_of(at(pr, c)) != 0) at(pr, c) *= inv;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr || sign_of(at(r, pc)) == 0) continue;
      const T f = at(r, pc);
      for (std::size_t c = 0; c <= cols_; ++c)
        if (sign_of(at(pr, c)) != 0) at(r, c) -= f * at(pr, c);
      if constexpr (!is_exact_v<T>) at(r, pc) = 0.0;
    }
  }

  void drop_row(std::size_t r) {
    // Move the last constraint row over r, then shift the objective row up.
    const std::size_t w = cols_ + 1;
    if (r != rows_ - 1)
      for (std::size_t c = 0; c < w; ++c) data_[r * w + c] = data_[(rows_ - 1) * w + c];
    for (std::size_t c = 0; c < w; ++c) data_[(rows_ - 1) * w + c] = data_[rows_ * w + c];
    --rows_;
    data_.resize((rows_ + 1) * w);
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<T> data_;
};

template <Scalar T>
bool is_negative(const T& v) {
  if constexpr (is_exact_v<T>) {
    return sgn(v) < 0;
  } else {
    return v < -1e-11;
  }
}

template <Scalar T>
bool is_positive(const T& v) {
  if constexpr (is_exact_v<T>) {
    return sgn(v) > 0;
  } else {
    return v > 1e-11;
  }
}

// Runs simplex iterations on the columns [0, active_cols). Returns false when
// the objective is unbounded below.
template <Scalar T>
bool run_simplex(Tableau<T>& tab, std::vector<std::size_t>& basis, std::size_t active_cols) {
  const std::size_t guard = 50000;
  for (std::size_t iter = 0; iter < guard; ++iter) {
    std::size_t enter = active_cols;
    for (std::size_t c = 0; c < active_cols; ++c)
      if (is_negative(tab.cost(c))) {
        enter = c;
        break;
      }
    if (enter == active_cols) return true;

    std::size_t leave = tab.rows();
    T best_ratio(0);
    for (std::size_t r = 0; r < tab.rows(); ++r) {
      if (!is_positive(tab.at(r, enter))) continue;
      T ratio = tab.rhs(r) / tab.at(r, enter);
      bool take = leave == tab.rows();
      if (!take) {
        if constexpr (is_exact_v<T>) {
          take = ratio < best_ratio || (ratio == best_ratio && basis[r] < basis[leave]);
        } else {
          const double gap = ratio - best_ratio;
          take = gap < -1e-14 || (std::fabs(gap) <= 1e-14 && basis[r] < basis[leave]);
        }
      }
      if (take) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave == tab.rows()) return false;
    tab.pivot(leave, enter);
    basis[leave] = enter;
  }
  throw Error("simplex iteration guard exceeded");
}

}  // namespace detail

template <Scalar T>
LpResult<T> solve_lp(const Matrix<T>& a, const Vector<T>& b, const Vector<T>& c) {
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  if (b.dim() != m || c.dim() != k) throw DimensionError("solve_lp: inconsistent dimensions");

  // Columns: k structural, m artificial.
  detail::Tableau<T> tab(m, k + m);
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    const bool flip = sign_of(b[r]) < 0;
    for (std::size_t j = 0; j < k; ++j) tab.at(r, j) = flip ? T(-a(r, j)) : a(r, j);
    tab.rhs(r) = flip ? T(-b[r]) : b[r];
    tab.at(r, k + r) = T(1);
    basis[r] = k + r;
  }

  // Phase 1 objective: sum of artificials, expressed in nonbasic terms.
  for (std::size_t j = 0; j <= k + m; ++j) {
    T s(0);
    if (j < k || j == k + m)
      for (std::size_t r = 0; r < m; ++r) s -= tab.at(r, j);
    tab.at(m, j) = s;
  }
  detail::run_simplex(tab, basis, k + m);

  LpResult<T> result;
  {
    const T phase1 = T(-tab.at(tab.rows(), k + m));
    bool infeasible;
    if constexpr (is_exact_v<T>) {
      infeasible = sgn(phase1) != 0;
    } else {
      double scale = 1.0;
      for (std::size_t r = 0; r < m; ++r) scale = std::max(scale, std::fabs(b[r]));
      infeasible = phase1 > 1e-9 * scale;
    }
    if (infeasible) {
      result.status = LpStatus::infeasible;
      return result;
    }
  }

  // Drive artificials out of the basis; drop redundant rows.
  for (std::size_t r = 0; r < tab.rows();) {
    if (basis[r] < k) {
      ++r;
      continue;
    }
    std::size_t col = k;
    double best = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if constexpr (is_exact_v<T>) {
        if (sgn(tab.at(r, j)) != 0) {
          col = j;
          break;
        }
      } else {
        if (std::fabs(tab.at(r, j)) > std::max(best, 1e-9)) {
          best = std::fabs(tab.at(r, j));
          col = j;
        }
      }
    }
    if (col == k) {
      tab.drop_row(r);
      basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(r));
      continue;
    }
    tab.pivot(r, col);
    basis[r] = col;
    ++r;
  }

  // Phase 2 objective row: reduced costs c_j - c_B^T B^-1 A_j.
  const std::size_t rows = tab.rows();
  for (std::size_t j = 0; j <= k + m; ++j) tab.at(rows, j) = (j < k) ? c[j] : T(0);
  for (std::size_t r = 0; r < rows; ++r) {
    const T cb = c[basis[r]];
    if (sign_of(cb) == 0) continue;
    for (std::size_t j = 0; j <= k + m; ++j)
      if (sign_of(tab.at(r, j)) != 0) tab.at(rows, j) -= cb * tab.at(r, j);
  }
  if (!detail::run_simplex(tab, basis, k)) {
    result.status = LpStatus::unbounded;
    return result;
  }

  result.status = LpStatus::optimal;
  result.x = Vector<T>(k);
  for (std::size_t r = 0; r < rows; ++r) {
    if constexpr (is_exact_v<T>) {
      result.x[basis[r]] = tab.rhs(r);
    } else {
      result.x[basis[r]] = std::max(0.0, tab.rhs(r));
    }
  }
  result.objective = dot(c, result.x);
  return result;
}

}  // namespace minex
