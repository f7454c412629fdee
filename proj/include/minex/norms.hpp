#pragma once

// Minkowski norms on R^n.
//
// Four representations: l_p (p rational, p >= 1), l_inf, the gauge of a
// centrally symmetric polytope given by its vertices, and a base norm
// composed with an invertible linear map, x -> base(M x).
//
// Exact evaluation is available for l_1, l_inf, polytopal gauges and
// transforms of those; general l_p is floating only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "minex/linalg.hpp"
#include "minex/rng.hpp"
#include "minex/scalar.hpp"
#include "minex/simplex.hpp"

namespace minex {

enum class NormKind { lp, linf, polytopal, transformed };

inline const char* norm_kind_name(NormKind k) {
  switch (k) {
    case NormKind::lp: return "lp";
    case NormKind::linf: return "linf";
    case NormKind::polytopal: return "polytopal";
    case NormKind::transformed: return "transformed";
  }
  return "?";
}

class InvalidNorm : public Error {
 public:
  using Error::Error;
};

/// Largest l_inf vertex enumeration (2^n sign vectors) we are willing to build.
inline constexpr std::size_t kMaxCubeVertexDim = 16;

template <Scalar T>
class NormSpec {
 public:
  static NormSpec lp(const Rational& p, std::size_t dim) {
    if (p < 1) throw InvalidNorm("l_p norm requires p >= 1, got " + to_string(p));
    auto d = make(NormKind::lp, dim);
    d->p = p;
    return NormSpec(std::move(d));
  }
  static NormSpec l1(std::size_t dim) { return lp(Rational(1), dim); }
  static NormSpec l2(std::size_t dim) { return lp(Rational(2), dim); }
  static NormSpec linf(std::size_t dim) { return NormSpec(make(NormKind::linf, dim)); }

  /// Gauge of conv(vertices). The list must be centrally symmetric and span R^n.
  /// Floating symmetry is checked with an absolute tolerance of 1e-12.
  static NormSpec polytopal(std::vector<Vector<T>> vertices) {
    if (vertices.empty()) throw InvalidNorm("polytopal norm needs at least one vertex");
    const std::size_t n = vertices.front().dim();
    for (const auto& v : vertices)
      if (v.dim() != n) throw InvalidNorm("polytopal vertices have inconsistent dimensions");
    for (const auto& v : vertices) {
      const Vector<T> neg = -v;
      const bool found = std::any_of(vertices.begin(), vertices.end(),
                                     [&](const Vector<T>& w) { return approx_equal(w, neg, 1e-12); });
      if (!found) throw InvalidNorm("polytopal vertex set is not centrally symmetric");
    }
    if (rank_of<T>(vertices) != n) throw InvalidNorm("polytopal vertices do not span R^n");
    auto d = make(NormKind::polytopal, n);
    d->vertices = std::move(vertices);
    return NormSpec(std::move(d));
  }

  /// x -> base(M x); M must be square of the base dimension and invertible.
  static NormSpec transformed(const NormSpec& base, Matrix<T> m) {
    if (!m.square() || m.rows() != base.dim())
      throw InvalidNorm("transform matrix must be square of the base dimension");
    auto inv = inverse(m);
    if (!inv) throw InvalidNorm("transform matrix is singular");
    auto d = make(NormKind::transformed, base.dim());
    d->matrix = std::move(m);
    d->inverse = std::move(*inv);
    d->base = std::make_shared<const NormSpec>(base);
    return NormSpec(std::move(d));
  }

  NormKind kind() const { return impl_->kind; }
  std::size_t dim() const { return impl_->dim; }
  const Rational& p() const { return impl_->p; }
  const std::vector<Vector<T>>& vertices() const { return impl_->vertices; }
  const Matrix<T>& matrix() const { return impl_->matrix; }
  const Matrix<T>& inverse_matrix() const { return impl_->inverse; }
  const NormSpec& base() const { return *impl_->base; }

  bool is_l1() const { return kind() == NormKind::lp && p() == 1; }
  bool is_l2() const { return kind() == NormKind::lp && p() == 2; }

  /// True when the unit ball is a polytope (l_1, l_inf, polytopal, or a transform of one).
  bool polytope_class() const {
    switch (kind()) {
      case NormKind::lp: return is_l1();
      case NormKind::linf: return true;
      case NormKind::polytopal: return true;
      case NormKind::transformed: return base().polytope_class();
    }
    return false;
  }

  bool exactly_evaluable() const { return polytope_class(); }

  std::string describe() const {
    std::ostringstream os;
    switch (kind()) {
      case NormKind::lp: os << "l_" << to_string(p()); break;
      case NormKind::linf: os << "l_inf"; break;
      case NormKind::polytopal: os << "polytopal(" << vertices().size() << " vertices)"; break;
      case NormKind::transformed: os << "transformed(" << base().describe() << ")"; break;
    }
    os << " on R^" << dim();
    return os.str();
  }

 private:
  struct Impl {
    NormKind kind = NormKind::linf;
    std::size_t dim = 0;
    Rational p = 1;
    std::vector<Vector<T>> vertices;
    Matrix<T> matrix;
    Matrix<T> inverse;
    std::shared_ptr<const NormSpec> base;
  };

  static std::shared_ptr<Impl> make(NormKind k, std::size_t dim) {
    if (dim == 0) throw InvalidNorm("norm dimension must be positive");
    auto d = std::make_shared<Impl>();
    d->kind = k;
    d->dim = dim;
    return d;
  }

  explicit NormSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

/// Floating copy of a norm description.
template <Scalar T>
NormSpec<double> to_double(const NormSpec<T>& spec) {
  if constexpr (!is_exact_v<T>) {
    return spec;
  } else {
    switch (spec.kind()) {
      case NormKind::lp: return NormSpec<double>::lp(spec.p(), spec.dim());
      case NormKind::linf: return NormSpec<double>::linf(spec.dim());
      case NormKind::polytopal: {
        std::vector<Vector<double>> vs;
        for (const auto& v : spec.vertices()) vs.push_back(to_double(v));
        return NormSpec<double>::polytopal(std::move(vs));
      }
      case NormKind::transformed:
        return NormSpec<double>::transformed(to_double(spec.base()), to_double(spec.matrix()));
    }
    throw InvalidNorm("unknown norm kind");
  }
}

namespace detail {

template <Scalar T>
T polytope_gauge(const std::vector<Vector<T>>& vertices, const Vector<T>& x) {
  if (x.is_zero()) return T(0);
  const std::size_t n = x.dim();
  const std::size_t m = vertices.size();
  Matrix<T> a(n, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = vertices[j][i];
  Vector<T> ones(m);
  for (std::size_t j = 0; j < m; ++j) ones[j] = T(1);
  auto lp = solve_lp(a, x, ones);
  if (lp.status != LpStatus::optimal) throw Error("gauge linear program failed (vertices must span R^n)");
  return lp.objective;
}

}  // namespace detail

/// Phi(x).
template <Scalar T>
T evaluate_norm(const NormSpec<T>& spec, const Vector<T>& x) {
  if (x.dim() != spec.dim())
    throw DimensionError("evaluate_norm: vector has dimension " + std::to_string(x.dim()) + ", norm has " +
                         std::to_string(spec.dim()));
  switch (spec.kind()) {
    case NormKind::linf: {
      T m(0);
      for (const auto& c : x) {
        T a = abs_value(c);
        if (a > m) m = a;
      }
      return m;
    }
    case NormKind::lp: {
      if (spec.is_l1()) {
        T s(0);
        for (const auto& c : x) s += abs_value(c);
        return s;
      }
      if constexpr (is_exact_v<T>) {
        throw ModeError("l_" + to_string(spec.p()) + " cannot be evaluated in exact mode");
      } else {
        if (spec.is_l2()) {
          double s = 0.0;
          for (double c : x) s += c * c;
          return std::sqrt(s);
        }
        const double p = spec.p().get_d();
        double mx = 0.0;
        for (double c : x) mx = std::max(mx, std::fabs(c));
        if (mx == 0.0) return 0.0;
        double s = 0.0;
        for (double c : x) s += std::pow(std::fabs(c) / mx, p);
        return mx * std::pow(s, 1.0 / p);
      }
    }
    case NormKind::polytopal: return detail::polytope_gauge(spec.vertices(), x);
    case NormKind::transformed: return evaluate_norm(spec.base(), spec.matrix() * x);
  }
  throw InvalidNorm("unknown norm kind");
}

/// Points whose convex hull is the unit ball, when the ball is a polytope.
/// l_inf yields all 2^n sign vectors (n <= kMaxCubeVertexDim), sorted
/// lexicographically. Polytopal norms return their listed vertices, which may
/// include points that are not extreme.
template <Scalar T>
std::optional<std::vector<Vector<T>>> unit_ball_vertices(const NormSpec<T>& spec) {
  const std::size_t n = spec.dim();
  switch (spec.kind()) {
    case NormKind::linf: {
      if (n > kMaxCubeVertexDim) return std::nullopt;
      std::vector<Vector<T>> out;
      out.reserve(std::size_t{1} << n);
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        Vector<T> v(n);
        // Bit set means +1; iterating masks in this order gives lexicographic order.
        for (std::size_t i = 0; i < n; ++i) v[i] = ((mask >> (n - 1 - i)) & 1) ? T(1) : T(-1);
        out.push_back(std::move(v));
      }
      return out;
    }
    case NormKind::lp: {
      if (!spec.is_l1()) return std::nullopt;
      std::vector<Vector<T>> out;
      for (std::size_t i = 0; i < n; ++i) {
        out.push_back(Vector<T>::unit(n, i, -1));
        out.push_back(Vector<T>::unit(n, i, 1));
      }
      std::sort(out.begin(), out.end());
      return out;
    }
    case NormKind::polytopal: return spec.vertices();
    case NormKind::transformed: {
      auto base = unit_ball_vertices(spec.base());
      if (!base) return std::nullopt;
      for (auto& v : *base) v = spec.inverse_matrix() * v;
      return base;
    }
  }
  return std::nullopt;
}

namespace detail {

// argmax <c, v> over a finite list, ties to the lexicographically smallest v.
template <Scalar T>
Vector<T> best_vertex(const std::vector<Vector<T>>& vs, const Vector<T>& c) {
  const Vector<T>* best = nullptr;
  T best_val(0);
  for (const auto& v : vs) {
    const T val = dot(c, v);
    bool take = best == nullptr;
    if (!take) {
      if constexpr (is_exact_v<T>) {
        take = val > best_val || (val == best_val && v < *best);
      } else {
        const double tie = 1e-12 * std::max(1.0, std::fabs(best_val));
        take = val > best_val + tie || (std::fabs(val - best_val) <= tie && v < *best);
      }
    }
    if (take) {
      best = &v;
      best_val = val;
    }
  }
  return *best;
}

inline constexpr std::size_t kMaxEnumeratedVertices = 4096;

}  // namespace detail

/// A unit vector u maximizing <c, u>. Ties go to the lexicographically
/// smallest maximizer (for polytopal balls the smallest maximizer is a vertex).
template <Scalar T>
Vector<T> dual_maximizer(const NormSpec<T>& spec, const Vector<T>& c) {
  if (c.dim() != spec.dim()) throw DimensionError("dual_maximizer: dimension mismatch");
  if (c.is_zero()) throw Error("dual_maximizer: direction must be nonzero");
  const std::size_t n = spec.dim();
  switch (spec.kind()) {
    case NormKind::linf: {
      Vector<T> u(n);
      for (std::size_t i = 0; i < n; ++i) u[i] = sign_of(c[i]) > 0 ? T(1) : T(-1);
      return u;
    }
    case NormKind::lp: {
      if (spec.is_l1()) return detail::best_vertex(*unit_ball_vertices(spec), c);
      if constexpr (is_exact_v<T>) {
        throw ModeError("l_" + to_string(spec.p()) + " dual maximizer is not exact");
      } else {
        const double p = spec.p().get_d();
        const double q = p / (p - 1.0);
        Vector<double> u(n);
        double mx = 0.0;
        for (double v : c) mx = std::max(mx, std::fabs(v));
        for (std::size_t i = 0; i < n; ++i) u[i] = std::copysign(std::pow(std::fabs(c[i]) / mx, q - 1.0), c[i]);
        return u / evaluate_norm(spec, u);
      }
    }
    case NormKind::polytopal: return detail::best_vertex(spec.vertices(), c);
    case NormKind::transformed: {
      if (spec.polytope_class()) {
        auto vs = unit_ball_vertices(spec);
        if (vs && vs->size() <= detail::kMaxEnumeratedVertices) return detail::best_vertex(*vs, c);
      }
      // <c, M^-1 w> = <M^-T c, w>
      const Vector<T> w = dual_maximizer(spec.base(), spec.inverse_matrix().transpose() * c);
      return spec.inverse_matrix() * w;
    }
  }
  throw InvalidNorm("unknown norm kind");
}

/// Dual norm max{<c, u> : Phi(u) <= 1}.
template <Scalar T>
T dual_norm(const NormSpec<T>& spec, const Vector<T>& c) {
  if (c.is_zero()) return T(0);
  return dot(c, dual_maximizer(spec, c));
}

template <Scalar T>
bool is_unit(const NormSpec<T>& spec, const Vector<T>& x, double tol) {
  return eq_tol(evaluate_norm(spec, x), T(1), tol);
}

struct NormValidationReport {
  bool passed = true;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_homogeneity = 0.0;  // max |Phi(lx) - |l|Phi(x)|
  double worst_symmetry = 0.0;     // max |Phi(-x) - Phi(x)|
  double worst_triangle = 0.0;     // max Phi(x+y) - Phi(x) - Phi(y), clipped at 0
  double worst_definiteness = 0.0; // Phi(x) < 0 or Phi(x) == 0 for x != 0
};

/// Checks the norm axioms on `samples` seeded random pairs.
template <Scalar T>
NormValidationReport validate_norm(const NormSpec<T>& spec, std::size_t samples, std::uint64_t seed,
                                   double tol = 1e-9) {
  NormValidationReport rep;
  rep.samples = samples;
  Rng rng(seed);
  const std::size_t n = spec.dim();
  auto gap = [](const T& a, const T& b) { return std::fabs(to_double(a) - to_double(b)); };
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector<T> x = rng.cube_point<T>(n);
    const Vector<T> y = rng.cube_point<T>(n);
    const T lam = T(2) * rng.symmetric_unit<T>();
    const T fx = evaluate_norm(spec, x);
    const T fy = evaluate_norm(spec, y);

    bool bad = false;
    if (sign_of(fx) < 0 || (sign_of(fx) == 0 && !x.is_zero())) {
      rep.worst_definiteness = std::max(rep.worst_definiteness, std::fabs(to_double(fx)) + 1.0);
      bad = true;
    }
    const T hl = evaluate_norm(spec, Vector<T>(x) * lam);
    const T hr = abs_value(lam) * fx;
    rep.worst_homogeneity = std::max(rep.worst_homogeneity, gap(hl, hr));
    if (!eq_tol(hl, hr, tol * std::max(1.0, std::fabs(to_double(hr))))) bad = true;

    const T fneg = evaluate_norm(spec, -x);
    rep.worst_symmetry = std::max(rep.worst_symmetry, gap(fneg, fx));
    if (!eq_tol(fneg, fx, tol)) bad = true;

    const T fsum = evaluate_norm(spec, x + y);
    const T rhs = fx + fy;
    if (fsum > rhs) rep.worst_triangle = std::max(rep.worst_triangle, to_double(T(fsum - rhs)));
    if (!leq_tol(fsum, rhs, tol)) bad = true;

    if (bad) ++rep.violations;
  }
  rep.passed = rep.violations == 0;
  return rep;
}

/// Regular polygon unit ball with `sides` vertices (even), first vertex at angle `phase`.
inline NormSpec<double> regular_polygon_norm(int sides, double phase = 0.0) {
  if (sides < 4 || sides % 2 != 0) throw InvalidNorm("regular polygon norm needs an even number >= 4 of sides");
  std::vector<Vector<double>> vs;
  for (int k = 0; k < sides / 2; ++k) {
    const double t = phase + 2.0 * std::numbers::pi * k / sides;
    vs.push_back(Vector<double>{std::cos(t), std::sin(t)});
  }
  const std::size_t half = vs.size();
  for (std::size_t k = 0; k < half; ++k) vs.push_back(-vs[k]);
  return NormSpec<double>::polytopal(std::move(vs));
}

/// Affinely regular hexagon with rational vertices (+-1,0), (0,+-1), +-(1,1).
template <Scalar T>
NormSpec<T> rational_hexagon_norm() {
  std::vector<Vector<T>> vs{{T(1), T(0)}, {T(1), T(1)}, {T(0), T(1)}, {T(-1), T(0)}, {T(-1), T(-1)}, {T(0), T(-1)}};
  return NormSpec<T>::polytopal(std::move(vs));
}

}  // namespace minex
