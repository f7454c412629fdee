#pragma once

// Seeded random streams. std::mt19937_64 is bit-identical across standard
// libraries, the std distributions are not, so the conversions to doubles
// and rationals are done by hand.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "minex/linalg.hpp"
#include "minex/scalar.hpp"

namespace minex {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for substream `stream` of `seed`; used to split work across workers.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform scalar in [-1, 1]. Exact mode draws from the grid k/denominator.
  template <Scalar T>
  T symmetric_unit(long denominator = 1024) {
    if constexpr (is_exact_v<T>) {
      Rational q(range(-denominator, denominator), denominator);
      q.canonicalize();
      return q;
    } else {
      return uniform(-1.0, 1.0);
    }
  }

  template <Scalar T>
  Vector<T> cube_point(std::size_t n, long denominator = 1024) {
    Vector<T> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = symmetric_unit<T>(denominator);
    return v;
  }

  Vector<double> gaussian(std::size_t n) {
    Vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace minex
