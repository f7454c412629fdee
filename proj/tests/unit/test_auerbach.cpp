#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "minex/auerbach.hpp"
#include "test_support.hpp"

using namespace minex;
using namespace minex::test;

TEST_CASE("axis start is a fixed point for linf and l1", "[auerbach]") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (const auto& norm : {NormSpec<Q>::linf(n), NormSpec<Q>::l1(n)}) {
      const auto f = compute_auerbach(norm, 1, 0);
      CHECK(abs_value(f.det) == 1);
      CHECK(f.transform == Matrix<Q>::identity(n));
      CHECK(f.det_history.size() == 1);
    }
  }
}

TEST_CASE("l1 frames never exceed |det| = 1", "[auerbach]") {
  // columns of l1 norm 1 have euclidean norm <= 1, so Hadamard's inequality caps |det| at 1
  for (std::size_t n = 2; n <= 3; ++n) {
    const auto f = compute_auerbach(NormSpec<double>::l1(n), 16, 7);
    CHECK(std::fabs(std::fabs(f.det) - 1.0) <= 1e-9);
    CHECK(verify_auerbach(f, NormSpec<double>::l1(n), 2000, 1).passed);
  }
}

TEST_CASE("random restarts in linf reach the larger Hadamard frame", "[auerbach]") {
  const auto f = compute_auerbach(NormSpec<Q>::linf(2), 16, 7);
  // |det| of a 2x2 sign matrix is at most 2
  CHECK(abs_value(f.det) == 2);
  for (const auto& b : f.basis) CHECK(oracle_linf(b) == 1);
  CHECK(verify_auerbach(f, NormSpec<Q>::linf(2), 2000, 3).passed);
}

TEST_CASE("l2 frames are orthonormal", "[auerbach]") {
  const auto norm = NormSpec<double>::l2(3);
  const auto f = compute_auerbach(norm, 4, 11);
  CHECK(std::fabs(std::fabs(f.det) - 1.0) <= 1e-9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(dot(f.basis[i], f.basis[j]) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-9));
  CHECK(verify_auerbach(f, norm, 3000, 2).passed);
}

TEST_CASE("hexagon frame satisfies the sandwich inequality", "[auerbach]") {
  const auto hex = regular_polygon_norm(6);
  const auto f = compute_auerbach(hex, 16, 5);
  const auto rep = verify_auerbach(f, hex, 10000, 9);
  CHECK(rep.passed);
  CHECK(rep.lower_violations == 0);
  CHECK(rep.upper_violations == 0);
  CHECK(rep.dual_norm_deviation <= 1e-9);

  const auto exact = compute_auerbach(rational_hexagon_norm<Q>(), 8, 5);
  CHECK(verify_auerbach(exact, rational_hexagon_norm<Q>(), 2000, 9).passed);
  CHECK(exact.inverse_transform() * exact.transform == Matrix<Q>::identity(2));
}

TEST_CASE("ascent is monotone and frames are invariant-clean", "[auerbach][property]") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 2 + seed % 2;
    const auto norm = random_polytopal_norm(n, 4 + seed % 3, 1000 + seed);
    const auto f = compute_auerbach(norm, 8, seed);
    for (std::size_t k = 1; k < f.det_history.size(); ++k) CHECK(f.det_history[k] >= f.det_history[k - 1]);
    for (const auto& b : f.basis) CHECK(std::fabs(evaluate_norm(norm, b) - 1.0) <= 1e-9);
    const auto id = f.inverse_transform() * f.transform;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(id(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
    CHECK(verify_auerbach(f, norm, 1000, seed).passed);
  }
}

TEST_CASE("exact frames for transformed linf are exact", "[auerbach][property]") {
  Rng rng(41);
  for (int t = 0; t < 5; ++t) {
    const std::size_t n = 2 + t % 2;
    const auto norm = NormSpec<Q>::transformed(NormSpec<Q>::linf(n), random_invertible_rational(n, rng));
    const auto f = compute_auerbach(norm, 4, t);
    for (const auto& b : f.basis) CHECK(evaluate_norm(norm, b) == 1);
    for (const auto& d : f.duals) CHECK(dual_norm(norm, d) == 1);
    CHECK(f.inverse_transform() * f.transform == Matrix<Q>::identity(n));
  }
}

TEST_CASE("a shrunken basis vector is reported as a lower-bound violation", "[auerbach]") {
  auto f = compute_auerbach(NormSpec<Q>::linf(2), 1, 0);
  f.basis[0] = f.basis[0] / Q(2);
  f.transform(0, 0) = q(1, 2);
  f.duals[0] = f.duals[0] * Q(2);
  const auto rep = verify_auerbach(f, NormSpec<Q>::linf(2), 2000, 4);
  CHECK_FALSE(rep.passed);
  CHECK(rep.lower_violations > 0);
  CHECK(rep.upper_violations == 0);
  CHECK(rep.basis_unit_deviation == Catch::Approx(0.5));
}

TEST_CASE("auerbach argument errors", "[auerbach][errors]") {
  CHECK_THROWS_AS(compute_auerbach(NormSpec<Q>::linf(2), 0, 0), Error);
  CHECK_THROWS_AS(compute_auerbach(NormSpec<Q>::l2(2), 1, 0), ModeError);
  const auto f = compute_auerbach(NormSpec<Q>::linf(2), 1, 0);
  CHECK_THROWS_AS(verify_auerbach(f, NormSpec<Q>::linf(3), 10, 0), DimensionError);
}

TEST_CASE("restart results do not depend on the worker count", "[auerbach]") {
  const auto norm = random_polytopal_norm(3, 5, 77);
  AuerbachOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const auto a = compute_auerbach(norm, 8, 3, one);
  const auto b = compute_auerbach(norm, 8, 3, many);
  CHECK(a.basis == b.basis);
  CHECK(a.restart == b.restart);
}
