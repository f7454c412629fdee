#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "minex/scalar.hpp"

namespace minex {

/// Point of R^n with coordinates x(0)..x(n-1).
template <Scalar T>
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n) : coords_(n, T(0)) {}
  Vector(std::initializer_list<T> xs) : coords_(xs) {}
  explicit Vector(std::vector<T> xs) : coords_(std::move(xs)) {}

  static Vector unit(std::size_t n, std::size_t i, int sign = 1) {
    Vector e(n);
    e[i] = T(sign);
    return e;
  }

  std::size_t dim() const { return coords_.size(); }
  T& operator[](std::size_t i) { return coords_[i]; }
  const T& operator[](std::size_t i) const { return coords_[i]; }
  std::span<const T> coords() const { return coords_; }
  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const T& c) { return sign_of(c) == 0; });
  }

  Vector& operator+=(const Vector& o) {
    check_same(o);
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (sign_of(o.coords_[i]) != 0) coords_[i] += o.coords_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    check_same(o);
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (sign_of(o.coords_[i]) != 0) coords_[i] -= o.coords_[i];
    return *this;
  }
  Vector& operator*=(const T& s) {
    for (auto& c : coords_) c *= s;
    return *this;
  }
  Vector& operator/=(const T& s) {
    for (auto& c : coords_) c /= s;
    return *this;
  }

  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator*(Vector a, const T& s) { return a *= s; }
  friend Vector operator*(const T& s, Vector a) { return a *= s; }
  friend Vector operator/(Vector a, const T& s) { return a /= s; }
  friend Vector operator-(Vector a) {
    for (auto& c : a.coords_) c = -c;
    return a;
  }

  friend bool operator==(const Vector& a, const Vector& b) { return a.coords_ == b.coords_; }
  /// Lexicographic order on coordinates.
  friend bool operator<(const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.coords_.begin(), a.coords_.end(), b.coords_.begin(),
                                        b.coords_.end());
  }

 private:
  void check_same(const Vector& o) const {
    if (o.dim() != dim()) throw DimensionError("vector dimension mismatch");
  }

  std::vector<T> coords_;
};

template <Scalar T>
T dot(const Vector<T>& a, const Vector<T>& b) {
  if (a.dim() != b.dim()) throw DimensionError("dot: dimension mismatch");
  T s(0);
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

template <Scalar T>
double max_abs_diff(const Vector<T>& a, const Vector<T>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::fabs(to_double(a[i]) - to_double(b[i])));
  return m;
}

template <Scalar T>
Vector<double> to_double(const Vector<T>& v) {
  std::vector<double> out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = to_double(v[i]);
  return Vector<double>(std::move(out));
}

/// Equality with absolute coordinate tolerance in floating mode, exact otherwise.
template <Scalar T>
bool approx_equal(const Vector<T>& a, const Vector<T>& b, double tol) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return max_abs_diff(a, b) <= tol;
  }
}

/// Dense row-major matrix.
template <Scalar T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  /// Matrix whose columns are the given vectors.
  static Matrix from_columns(std::span<const Vector<T>> cols) {
    if (cols.empty()) return Matrix();
    Matrix m(cols[0].dim(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].dim() != m.rows_) throw DimensionError("from_columns: ragged columns");
      for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  static Matrix from_rows(std::span<const Vector<T>> rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows[0].dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].dim() != m.cols_) throw DimensionError("from_rows: ragged rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vector<T> row(std::size_t i) const {
    return Vector<T>(std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_));
  }
  Vector<T> column(std::size_t j) const {
    Vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Vector<T> operator*(const Matrix& m, const Vector<T>& x) {
    if (x.dim() != m.cols_) throw DimensionError("matrix-vector dimension mismatch");
    Vector<T> y(m.rows_);
    for (std::size_t i = 0; i < m.rows_; ++i) {
      T s(0);
      for (std::size_t j = 0; j < m.cols_; ++j)
        if (sign_of(x[j]) != 0) s += m(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (sign_of(a(i, k)) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <Scalar T>
Matrix<double> to_double(const Matrix<T>& m) {
  Matrix<double> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

namespace detail {

// Pivot threshold for floating elimination, relative to the largest entry.
inline constexpr double kPivotEps = 1e-12;

template <Scalar T>
bool pivot_is_zero(const T& v, double scale) {
  if constexpr (is_exact_v<T>) {
    return sgn(v) == 0;
  } else {
    return std::fabs(v) <= kPivotEps * std::max(1.0, scale);
  }
}

template <Scalar T>
double max_entry(const Matrix<T>& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s = std::max(s, std::fabs(to_double(m(i, j))));
  return s;
}

}  // namespace detail

/// Reduced row echelon form in place; returns the pivot columns.
/// Exact mode picks the first nonzero pivot, floating mode uses partial pivoting.
template <Scalar T>
std::vector<std::size_t> rref(Matrix<T>& m) {
  const double scale = detail::max_entry(m);
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t best = m.rows();
    if constexpr (is_exact_v<T>) {
      for (std::size_t i = r; i < m.rows(); ++i)
        if (sgn(m(i, c)) != 0) {
          best = i;
          break;
        }
    } else {
      double bv = 0.0;
      for (std::size_t i = r; i < m.rows(); ++i)
        if (std::fabs(m(i, c)) > bv) {
          bv = std::fabs(m(i, c));
          best = i;
        }
      if (best != m.rows() && detail::pivot_is_zero(m(best, c), scale)) best = m.rows();
    }
    if (best == m.rows()) continue;
    if (best != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(best, j));
    const T inv = T(1) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || sign_of(m(i, c)) == 0) continue;
      const T f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <Scalar T>
std::size_t rank(Matrix<T> m) {
  return rref(m).size();
}

template <Scalar T>
std::size_t rank_of(std::span<const Vector<T>> vs) {
  if (vs.empty()) return 0;
  return rank(Matrix<T>::from_rows(vs));
}

template <Scalar T>
T determinant(Matrix<T> m) {
  if (!m.square()) throw DimensionError("determinant of non-square matrix");
  const std::size_t n = m.rows();
  const double scale = detail::max_entry(m);
  T det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = n;
    if constexpr (is_exact_v<T>) {
      for (std::size_t i = c; i < n; ++i)
        if (sgn(m(i, c)) != 0) {
          best = i;
          break;
        }
    } else {
      double bv = -1.0;
      for (std::size_t i = c; i < n; ++i)
        if (std::fabs(m(i, c)) > bv) {
          bv = std::fabs(m(i, c));
          best = i;
        }
      if (detail::pivot_is_zero(m(best, c), scale)) best = n;
    }
    if (best == n) return T(0);
    if (best != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(best, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (sign_of(m(i, c)) == 0) continue;
      const T f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

/// Inverse, or nullopt when singular.
template <Scalar T>
std::optional<Matrix<T>> inverse(const Matrix<T>& m) {
  if (!m.square()) throw DimensionError("inverse of non-square matrix");
  const std::size_t n = m.rows();
  Matrix<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  auto piv = rref(aug);
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  Matrix<T> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

/// Some solution of A x = b, or nullopt if the system is inconsistent.
/// Free variables are set to zero.
template <Scalar T>
std::optional<Vector<T>> solve(const Matrix<T>& a, const Vector<T>& b) {
  if (b.dim() != a.rows()) throw DimensionError("solve: rhs dimension mismatch");
  const std::size_t n = a.cols();
  Matrix<T> aug(a.rows(), n + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  auto piv = rref(aug);
  if (!piv.empty() && piv.back() == n) return std::nullopt;
  if constexpr (!is_exact_v<T>) {
    // Rows past the rank must have a negligible right-hand side.
    const double scale = std::max(1.0, detail::max_entry(aug));
    for (std::size_t i = piv.size(); i < a.rows(); ++i)
      if (std::fabs(aug(i, n)) > 1e-9 * scale) return std::nullopt;
  }
  Vector<T> x(n);
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(r, n);
  return x;
}

}  // namespace minex
