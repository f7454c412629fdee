#pragma once

// Maximum (A')- and (A)-sets over a finite pool of unit vectors.
//
// (A') is pairwise, so its maximum over a pool is the clique number of the
// compatibility graph (edge iff Phi(x + y) <= 1 + tol). (A) is searched by
// depth-first branch and bound: a candidate stays alive only while it is
// compatible with every subset sum of the partial set, and greedy colouring
// of the live candidates bounds the achievable size.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "minex/conditions.hpp"
#include "minex/linalg.hpp"
#include "minex/norms.hpp"
#include "minex/rng.hpp"
#include "minex/scalar.hpp"

namespace minex {

inline constexpr std::size_t kMaxPoolSize = 10000;

/// Floating candidates; entries that are known exactly also carry their
/// rational form, so later stages can certify without rounding.
struct CandidatePool {
  NormSpec<double> norm = NormSpec<double>::linf(1);
  std::optional<NormSpec<Rational>> exact_norm;
  std::vector<Vector<double>> candidates;
  std::vector<std::optional<Vector<Rational>>> exact;
  std::string generator;
  std::size_t resolution = 0;
  std::optional<std::uint64_t> rotation_seed;
  double tolerance = 1e-9;

  std::size_t size() const { return candidates.size(); }
  std::size_t dim() const { return norm.dim(); }

  /// Appends x unless it duplicates an existing candidate within 1e-12.
  bool add(Vector<double> x, std::optional<Vector<Rational>> ex = std::nullopt) {
    if (x.dim() != dim()) throw DimensionError("candidate pool: dimension mismatch");
    if (!is_unit(norm, x, tolerance)) throw Error("candidate pool: candidate is not a unit vector");
    for (const auto& y : candidates)
      if (max_abs_diff(x, y) <= 1e-12) return false;
    candidates.push_back(std::move(x));
    exact.push_back(std::move(ex));
    return true;
  }
};

struct PoolOptions {
  std::optional<std::uint64_t> rotation_seed;  // random phase for the grid
  double tolerance = 1e-9;
};

namespace detail {

inline std::vector<Vector<double>> sphere_directions(std::size_t n, std::size_t resolution, double phase,
                                                     const Matrix<double>& rotation) {
  std::vector<Vector<double>> dirs;
  if (n == 2) {
    for (std::size_t k = 0; k < resolution; ++k) {
      const double t = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(resolution);
      dirs.push_back(Vector<double>{std::cos(t), std::sin(t)});
    }
  } else {
    // golden-angle spiral: nearly uniform points on S^2
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < resolution; ++k) {
      const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(resolution);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = golden * static_cast<double>(k);
      dirs.push_back(rotation * Vector<double>{r * std::cos(t), r * std::sin(t), z});
    }
  }
  return dirs;
}

// Rotation matrix from a seeded random unit quaternion.
inline Matrix<double> random_rotation3(std::uint64_t seed) {
  Rng rng(seed);
  Vector<double> q = rng.gaussian(4);
  double s = 0.0;
  for (double c : q) s += c * c;
  q /= std::sqrt(s);
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return Matrix<double>{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
                        {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
                        {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
}

inline CandidatePool make_pool(const NormSpec<double>& norm, const std::optional<NormSpec<Rational>>& exact_norm,
                               std::size_t resolution, const PoolOptions& opt) {
  const std::size_t n = norm.dim();
  if (n != 2 && n != 3) throw DimensionError("discretize_sphere supports n = 2 and n = 3 only");
  if (resolution < 4) throw Error("discretize_sphere: resolution must be at least 4");
  CandidatePool pool;
  pool.norm = norm;
  pool.exact_norm = exact_norm;
  pool.resolution = resolution;
  pool.rotation_seed = opt.rotation_seed;
  pool.tolerance = opt.tolerance;
  pool.generator = n == 2 ? "circle" : "golden-spiral";

  // exact candidates first: unit-ball vertices, then the axis points +-e_i / Phi(e_i)
  if (exact_norm && exact_norm->exactly_evaluable()) {
    if (auto vs = unit_ball_vertices(*exact_norm))
      for (auto& v : *vs)
        if (evaluate_norm(*exact_norm, v) == 1) pool.add(to_double(v), v);
    for (std::size_t i = 0; i < n; ++i)
      for (int sgn : {1, -1}) {
        const Vector<Rational> e = Vector<Rational>::unit(n, i, sgn);
        const Vector<Rational> u = e / evaluate_norm(*exact_norm, e);
        pool.add(to_double(u), u);
      }
  } else if (auto vs = unit_ball_vertices(norm)) {
    for (auto& v : *vs)
      if (is_unit(norm, v, 1e-12)) pool.add(v);
  }

  double phase = 0.0;
  Matrix<double> rot = Matrix<double>::identity(n);
  if (opt.rotation_seed) {
    Rng rng(*opt.rotation_seed);
    phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    if (n == 3) rot = random_rotation3(substream_seed(*opt.rotation_seed, 1));
  }
  for (auto& d : sphere_directions(n, resolution, phase, rot)) {
    const double s = evaluate_norm(norm, d);
    pool.add(d / s);
  }
  if (pool.size() > kMaxPoolSize) throw Error("candidate pool exceeds " + std::to_string(kMaxPoolSize) + " entries");
  return pool;
}

}  // namespace detail

/// `resolution` radially normalised grid directions (equally spaced angles for
/// n = 2, a golden-angle spiral for n = 3), preceded by the unit-ball vertices
/// of polytopal norms and the axis points. Exact forms are kept for the
/// vertices and axis points of exactly evaluable norms.
inline CandidatePool discretize_sphere(const NormSpec<Rational>& norm, std::size_t resolution,
                                       const PoolOptions& opt = {}) {
  return detail::make_pool(to_double(norm), norm, resolution, opt);
}

inline CandidatePool discretize_sphere(const NormSpec<double>& norm, std::size_t resolution,
                                       const PoolOptions& opt = {}) {
  return detail::make_pool(norm, std::nullopt, resolution, opt);
}

/// Undirected graph on 0..n-1 as adjacency bitsets.
class Graph {
 public:
  explicit Graph(std::size_t n = 0) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  std::size_t size() const { return n_; }
  std::size_t words() const { return words_; }

  void add_edge(std::size_t i, std::size_t j) {
    if (i == j) return;
    bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
    bits_[j * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
  }
  bool adjacent(std::size_t i, std::size_t j) const { return (bits_[i * words_ + j / 64] >> (j % 64)) & 1; }
  const std::uint64_t* row(std::size_t i) const { return bits_.data() + i * words_; }

  std::size_t degree(std::size_t i) const {
    std::size_t d = 0;
    for (std::size_t w = 0; w < words_; ++w) d += static_cast<std::size_t>(std::popcount(row(i)[w]));
    return d;
  }
  std::size_t edge_count() const {
    std::size_t e = 0;
    for (std::size_t i = 0; i < n_; ++i) e += degree(i);
    return e / 2;
  }

 private:
  std::size_t n_, words_;
  std::vector<std::uint64_t> bits_;
};

/// Edge (i, j) iff Phi(x_i + x_j) <= 1 + tolerance.
inline Graph build_compatibility_graph(const CandidatePool& pool) {
  if (pool.size() == 0) throw Error("build_compatibility_graph: empty pool");
  Graph g(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j)
      if (evaluate_norm(pool.norm, pool.candidates[i] + pool.candidates[j]) <= 1.0 + pool.tolerance) g.add_edge(i, j);
  return g;
}

struct SearchResult {
  Condition condition = Condition::A_prime;
  std::vector<std::size_t> best_set;  // ascending pool indices
  std::size_t size = 0;
  bool optimal = false;
  std::uint64_t nodes_explored = 0;
  double wall_time = 0.0;  // seconds
  std::size_t pool_size = 0;
  std::optional<std::size_t> clique_bound;  // (A) search: clique number used as the ceiling
};

namespace detail {

// Greedy sequential colouring of `cand` (in the given order). Returns the
// vertices sorted by colour class and the colour number of each, ascending.
inline void colour_sort(const Graph& g, const std::vector<std::size_t>& cand, std::vector<std::size_t>& order,
                        std::vector<std::size_t>& colours) {
  order.clear();
  colours.clear();
  std::vector<std::size_t> left = cand;
  std::size_t colour = 0;
  while (!left.empty()) {
    ++colour;
    std::vector<std::size_t> klass, rest;
    for (std::size_t v : left) {
      bool ok = true;
      for (std::size_t u : klass)
        if (g.adjacent(u, v)) {
          ok = false;
          break;
        }
      (ok ? klass : rest).push_back(v);
    }
    for (std::size_t v : klass) {
      order.push_back(v);
      colours.push_back(colour);
    }
    left = std::move(rest);
  }
}

struct BudgetExceeded {};

class CliqueSearch {
 public:
  CliqueSearch(const Graph& g, std::uint64_t budget) : g_(g), budget_(budget) {}

  void run() {
    std::vector<std::size_t> all(g_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::stable_sort(all.begin(), all.end(), [&](std::size_t a, std::size_t b) { return g_.degree(a) > g_.degree(b); });
    try {
      expand(all);
      optimal = true;
    } catch (const BudgetExceeded&) {
      optimal = false;
    }
  }

  std::vector<std::size_t> best;
  std::uint64_t nodes = 0;
  bool optimal = false;

 private:
  void expand(const std::vector<std::size_t>& cand) {
    std::vector<std::size_t> order, colours;
    colour_sort(g_, cand, order, colours);
    for (std::size_t i = order.size(); i-- > 0;) {
      if (current_.size() + colours[i] <= best.size()) return;
      if (++nodes > budget_) throw BudgetExceeded{};
      const std::size_t v = order[i];
      current_.push_back(v);
      std::vector<std::size_t> next;
      for (std::size_t k = 0; k < i; ++k)
        if (g_.adjacent(v, order[k])) next.push_back(order[k]);
      if (next.empty()) {
        if (current_.size() > best.size()) best = current_;
      } else {
        expand(next);
      }
      current_.pop_back();
    }
  }

  const Graph& g_;
  std::uint64_t budget_;
  std::vector<std::size_t> current_;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Maximum clique by branch and bound with greedy-colouring bounds. With the
/// node budget exhausted the incumbent is returned with optimal = false.
inline SearchResult max_clique(const Graph& g, std::uint64_t budget = 10'000'000) {
  const auto t0 = std::chrono::steady_clock::now();
  SearchResult r;
  r.condition = Condition::A_prime;
  r.pool_size = g.size();
  if (g.size() > 0) {
    detail::CliqueSearch s(g, budget);
    s.run();
    r.best_set = s.best;
    r.nodes_explored = s.nodes;
    r.optimal = s.optimal;
  } else {
    r.optimal = true;
  }
  std::sort(r.best_set.begin(), r.best_set.end());
  r.size = r.best_set.size();
  r.wall_time = detail::seconds_since(t0);
  return r;
}

namespace detail {

inline void require_postconditions(const SearchResult& r, const CandidatePool& pool) {
  const std::size_t n = pool.dim();
  if (r.condition == Condition::A && r.size > 2 * n)
    throw Error("search postcondition violated: (A)-set of size " + std::to_string(r.size) + " > 2n = " +
                std::to_string(2 * n) + " (checker bug)");
  if (n < 63 && r.size >= (std::size_t{1} << (n + 1)))
    throw Error("search postcondition violated: (A')-set of size " + std::to_string(r.size) +
                " >= 2^(n+1) (checker bug)");
  // independent re-check through the conditions module
  std::vector<Vector<double>> vs;
  for (std::size_t i : r.best_set) vs.push_back(pool.candidates[i]);
  if (vs.empty()) return;
  const VectorSet<double> s(std::move(vs), pool.norm, pool.tolerance);
  CheckOptions opt;
  opt.tolerance = pool.tolerance;
  opt.threads = 1;
  if (!check_condition(r.condition, s, opt).passed)
    throw Error(std::string("search result fails the independent ") + condition_name(r.condition) + " re-check");
}

class StrongSearch {
 public:
  StrongSearch(const CandidatePool& pool, const Graph& g, std::size_t ceiling, std::uint64_t budget)
      : pool_(pool), g_(g), ceiling_(ceiling), budget_(budget) {}

  void run() {
    std::vector<std::size_t> all(pool_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::stable_sort(all.begin(), all.end(), [&](std::size_t a, std::size_t b) { return g_.degree(a) > g_.degree(b); });
    std::vector<Vector<double>> sums{Vector<double>(pool_.dim())};
    try {
      dfs(all, sums);
      optimal = true;
    } catch (const BudgetExceeded&) {
      optimal = false;
    } catch (const Done&) {
      optimal = true;
    }
  }

  std::vector<std::size_t> best;
  std::uint64_t nodes = 0;
  bool optimal = false;

 private:
  struct Done {};

  bool fits(const Vector<double>& s) const { return evaluate_norm(pool_.norm, s) <= 1.0 + pool_.tolerance; }

  void dfs(const std::vector<std::size_t>& cand, const std::vector<Vector<double>>& sums) {
    std::vector<std::size_t> order, colours;
    colour_sort(g_, cand, order, colours);
    for (std::size_t i = order.size(); i-- > 0;) {
      if (current_.size() + colours[i] <= best.size()) return;
      if (++nodes > budget_) throw BudgetExceeded{};
      const std::size_t v = order[i];
      const Vector<double>& x = pool_.candidates[v];
      current_.push_back(v);
      std::vector<Vector<double>> grown = sums;
      for (const auto& s : sums) grown.push_back(s + x);
      if (current_.size() > best.size()) {
        best = current_;
        if (best.size() >= ceiling_) throw Done{};
      }
      std::vector<std::size_t> next;
      for (std::size_t k = 0; k < i; ++k) {
        const std::size_t w = order[k];
        if (!g_.adjacent(v, w)) continue;
        // w already fits every old sum; check the new ones s + x + w
        bool ok = true;
        for (std::size_t j = 0; j < sums.size() && ok; ++j) ok = fits(sums[j] + x + pool_.candidates[w]);
        if (ok) next.push_back(w);
      }
      if (!next.empty()) dfs(next, grown);
      current_.pop_back();
    }
  }

  const CandidatePool& pool_;
  const Graph& g_;
  std::size_t ceiling_;
  std::uint64_t budget_;
  std::vector<std::size_t> current_;
};

}  // namespace detail

/// Largest (A')-set over the pool.
inline SearchResult search_weak(const CandidatePool& pool, std::uint64_t budget = 10'000'000) {
  const auto t0 = std::chrono::steady_clock::now();
  const Graph g = build_compatibility_graph(pool);
  SearchResult r = max_clique(g, budget);
  r.wall_time = detail::seconds_since(t0);
  detail::require_postconditions(r, pool);
  return r;
}

/// Largest (A)-set over the pool. The clique number of the compatibility
/// graph is computed first and ends the search once reached.
inline SearchResult search_strong(const CandidatePool& pool, std::uint64_t budget = 10'000'000) {
  if (pool.size() > kMaxPoolSize) throw Error("search_strong: pool larger than " + std::to_string(kMaxPoolSize));
  const auto t0 = std::chrono::steady_clock::now();
  const Graph g = build_compatibility_graph(pool);
  const SearchResult clique = max_clique(g, budget);
  const std::size_t ceiling = clique.optimal ? clique.size : pool.size();

  detail::StrongSearch s(pool, g, ceiling, budget);
  s.run();
  SearchResult r;
  r.condition = Condition::A;
  r.best_set = s.best;
  std::sort(r.best_set.begin(), r.best_set.end());
  r.size = r.best_set.size();
  r.optimal = s.optimal;
  r.nodes_explored = clique.nodes_explored + s.nodes;
  r.pool_size = pool.size();
  if (clique.optimal) r.clique_bound = clique.size;
  r.wall_time = detail::seconds_since(t0);
  detail::require_postconditions(r, pool);
  return r;
}

/// Pool entries of a result; exact forms when every member has one.
inline std::optional<VectorSet<Rational>> exact_result_set(const CandidatePool& pool, const SearchResult& r) {
  if (!pool.exact_norm || !pool.exact_norm->exactly_evaluable()) return std::nullopt;
  std::vector<Vector<Rational>> vs;
  for (std::size_t i : r.best_set) {
    if (!pool.exact[i]) return std::nullopt;
    vs.push_back(*pool.exact[i]);
  }
  return VectorSet<Rational>(std::move(vs), *pool.exact_norm);
}

}  // namespace minex
