#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "minex/norms.hpp"
#include "test_support.hpp"

using namespace minex;
using namespace minex::test;

namespace {

std::vector<VQ> square_vertices() { return {vq({1, 1}), vq({1, -1}), vq({-1, 1}), vq({-1, -1})}; }

std::vector<VQ> cube_vertices(std::size_t n) {
  std::vector<VQ> vs;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    VQ v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = ((m >> i) & 1) ? 1 : -1;
    vs.push_back(v);
  }
  return vs;
}

std::vector<VQ> cross_vertices(std::size_t n) {
  std::vector<VQ> vs;
  for (std::size_t i = 0; i < n; ++i) {
    vs.push_back(VQ::unit(n, i, 1));
    vs.push_back(VQ::unit(n, i, -1));
  }
  return vs;
}

}  // namespace

TEST_CASE("norm evaluation on small inputs", "[norms]") {
  CHECK(evaluate_norm(NormSpec<Q>::linf(2), vq({1, q(-1, 2)})) == 1);
  CHECK(evaluate_norm(NormSpec<Q>::l1(2), vq({q(1, 2), q(1, 2)})) == 1);
  CHECK(evaluate_norm(NormSpec<Q>::polytopal(square_vertices()), vq({q(1, 2), q(1, 2)})) == q(1, 2));
  CHECK(evaluate_norm(NormSpec<double>::l2(2), VD{3.0, 4.0}) == Catch::Approx(5.0));
  CHECK(evaluate_norm(NormSpec<double>::lp(Q(3), 2), VD{1.0, 1.0}) == Catch::Approx(std::cbrt(2.0)));
}

TEST_CASE("exact mode rejects norms it cannot evaluate exactly", "[norms][errors]") {
  CHECK_THROWS_AS(evaluate_norm(NormSpec<Q>::lp(Q(3), 2), vq({1, 0})), ModeError);
  CHECK_THROWS_AS(evaluate_norm(NormSpec<Q>::l2(2), vq({1, 0})), ModeError);
  CHECK_THROWS_AS(evaluate_norm(NormSpec<Q>::linf(3), vq({1, 0})), DimensionError);
  CHECK_FALSE(NormSpec<Q>::l2(2).exactly_evaluable());
  CHECK(NormSpec<Q>::l1(2).exactly_evaluable());
}

TEST_CASE("invalid norm descriptions are rejected at construction", "[norms][errors]") {
  CHECK_THROWS_AS(NormSpec<Q>::lp(q(1, 2), 2), InvalidNorm);
  CHECK_THROWS_AS(NormSpec<Q>::polytopal({vq({1, 0}), vq({0, 1}), vq({-1, 0})}), InvalidNorm);
  // symmetric but not spanning
  CHECK_THROWS_AS(NormSpec<Q>::polytopal({vq({1, 1}), vq({-1, -1})}), InvalidNorm);
  Matrix<Q> singular{{q(1), q(2)}, {q(2), q(4)}};
  CHECK_THROWS_AS(NormSpec<Q>::transformed(NormSpec<Q>::linf(2), singular), InvalidNorm);
}

TEST_CASE("cube and cross-polytope gauges agree exactly with linf and l1", "[norms][property]") {
  Rng rng(17);
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cube = NormSpec<Q>::polytopal(cube_vertices(n));
    const auto cross = NormSpec<Q>::polytopal(cross_vertices(n));
    for (int t = 0; t < 25; ++t) {
      const VQ x = rng.cube_point<Q>(n, 16);
      CHECK(evaluate_norm(cube, x) == oracle_linf(x));
      CHECK(evaluate_norm(cross, x) == oracle_l1(x));
      CHECK(evaluate_norm(NormSpec<Q>::linf(n), x) == oracle_linf(x));
      CHECK(evaluate_norm(NormSpec<Q>::l1(n), x) == oracle_l1(x));
    }
  }
}

TEST_CASE("norms are positive definite", "[norms][property]") {
  Rng rng(19);
  const auto hexagon = rational_hexagon_norm<Q>();
  for (int t = 0; t < 100; ++t) {
    const VQ x = rng.cube_point<Q>(2, 8);
    const Q v = evaluate_norm(hexagon, x);
    CHECK(v >= 0);
    CHECK((v == 0) == x.is_zero());
  }
  CHECK(evaluate_norm(hexagon, VQ(2)) == 0);
}

TEST_CASE("transformed norm equals base norm after the map", "[norms][property]") {
  Rng rng(23);
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto m = random_invertible_rational(n, rng);
    for (const auto& base : {NormSpec<Q>::linf(n), NormSpec<Q>::l1(n)}) {
      const auto t = NormSpec<Q>::transformed(base, m);
      for (int k = 0; k < 20; ++k) {
        const VQ x = rng.cube_point<Q>(n, 32);
        CHECK(evaluate_norm(t, x) == evaluate_norm(base, m * x));
      }
    }
  }
}

TEST_CASE("dual maximizer on the reference examples", "[norms]") {
  const VD u = dual_maximizer(NormSpec<double>::l2(2), VD{3.0, 4.0});
  CHECK(u[0] == Catch::Approx(0.6));
  CHECK(u[1] == Catch::Approx(0.8));
  CHECK(dual_maximizer(NormSpec<Q>::linf(2), vq({1, -2})) == vq({1, -1}));
  CHECK(dual_maximizer(NormSpec<Q>::l1(2), vq({0, 5})) == vq({0, 1}));
  CHECK_THROWS_AS(dual_maximizer(NormSpec<Q>::l1(2), vq({0, 0})), Error);
}

TEST_CASE("dual maximizer ties break toward the lexicographically smallest vertex", "[norms]") {
  // c = e_1 touches the square edge {x = 1}; both (1, -1) and (1, 1) attain 1.
  CHECK(dual_maximizer(NormSpec<Q>::linf(2), vq({1, 0})) == vq({1, -1}));
  CHECK(dual_maximizer(NormSpec<Q>::polytopal(square_vertices()), vq({1, 0})) == vq({1, -1}));
  // l1 with c = (1, 1): e_1 and e_2 tie, (0, 1) is smaller.
  CHECK(dual_maximizer(NormSpec<Q>::l1(2), vq({1, 1})) == vq({0, 1}));
}

TEST_CASE("dual maximizer returns a unit vector beating random unit vectors", "[norms][property]") {
  Rng rng(29);
  const std::vector<NormSpec<double>> norms = {
      NormSpec<double>::l2(3),      NormSpec<double>::lp(Q(3), 3),  NormSpec<double>::lp(q(3, 2), 3),
      NormSpec<double>::linf(3),    NormSpec<double>::l1(3),        random_polytopal_norm(3, 6, 5),
      NormSpec<double>::transformed(NormSpec<double>::linf(3), to_double(random_invertible_rational(3, rng)))};
  for (const auto& norm : norms) {
    for (int t = 0; t < 10; ++t) {
      const VD c = rng.gaussian(3);
      const VD u = dual_maximizer(norm, c);
      CHECK(std::fabs(evaluate_norm(norm, u) - 1.0) <= 1e-12);
      const double best = dot(c, u);
      for (int k = 0; k < 100; ++k) {
        VD v = rng.gaussian(3);
        v /= evaluate_norm(norm, v);
        CHECK(dot(c, v) <= best + 1e-12);
      }
    }
  }
}

TEST_CASE("exact dual maximizer is exactly unit", "[norms][property]") {
  Rng rng(31);
  const auto m = random_invertible_rational(3, rng);
  const auto t = NormSpec<Q>::transformed(NormSpec<Q>::linf(3), m);
  for (int k = 0; k < 20; ++k) {
    const VQ c = rng.cube_point<Q>(3, 8);
    if (c.is_zero()) continue;
    CHECK(evaluate_norm(t, dual_maximizer(t, c)) == 1);
  }
}

TEST_CASE("unit ball vertices of the standard polytopes", "[norms]") {
  const auto v2 = unit_ball_vertices(NormSpec<Q>::linf(2));
  REQUIRE(v2);
  CHECK(v2->size() == 4);
  for (const auto& v : *v2) CHECK(oracle_linf(v) == 1);
  const auto c3 = unit_ball_vertices(NormSpec<Q>::l1(3));
  REQUIRE(c3);
  CHECK(c3->size() == 6);
  CHECK_FALSE(unit_ball_vertices(NormSpec<double>::l2(2)));
}

TEST_CASE("validate_norm accepts genuine norms", "[norms]") {
  CHECK(validate_norm(NormSpec<Q>::linf(3), 200, 1).passed);
  CHECK(validate_norm(NormSpec<Q>::polytopal(square_vertices()), 200, 2).passed);
  CHECK(validate_norm(NormSpec<double>::lp(Q(4), 3), 500, 3).passed);
  CHECK(validate_norm(regular_polygon_norm(8), 500, 4).passed);
  CHECK(validate_norm(random_polytopal_norm(3, 5, 9), 300, 5).passed);
}

TEST_CASE("regular polygon norm has unit vertices", "[norms]") {
  const auto oct = regular_polygon_norm(8);
  for (int k = 0; k < 8; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 8;
    CHECK(evaluate_norm(oct, VD{std::cos(t), std::sin(t)}) == Catch::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(regular_polygon_norm(5), InvalidNorm);
}
