#include <catch2/catch_amalgamated.hpp>

#include "minex/simplex.hpp"
#include "test_support.hpp"

using namespace minex;
using namespace minex::test;

TEST_CASE("exact simplex solves a small LP", "[simplex]") {
  // minimize -x1 - x2 s.t. x1 + 2 x2 + s1 = 4, 3 x1 + x2 + s2 = 6
  // vertex (8/5, 6/5) gives -14/5.
  Matrix<Q> a{{q(1), q(2), q(1), q(0)}, {q(3), q(1), q(0), q(1)}};
  auto r = solve_lp(a, vq({q(4), q(6)}), vq({q(-1), q(-1), q(0), q(0)}));
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == q(-14, 5));
  CHECK(r.x[0] == q(8, 5));
  CHECK(r.x[1] == q(6, 5));
}

TEST_CASE("infeasible and unbounded programs are reported", "[simplex]") {
  // x1 + x2 = -1 with x >= 0
  Matrix<Q> a{{q(1), q(1)}};
  CHECK(solve_lp(a, vq({q(-1)}), vq({q(1), q(1)})).status == LpStatus::infeasible);
  // minimize -x1 s.t. x1 - x2 = 0
  Matrix<Q> b{{q(1), q(-1)}};
  CHECK(solve_lp(b, vq({q(0)}), vq({q(-1), q(0)})).status == LpStatus::unbounded);
}

TEST_CASE("redundant equality rows are tolerated", "[simplex]") {
  Matrix<Q> a{{q(1), q(1), q(0)}, {q(2), q(2), q(0)}, {q(0), q(0), q(1)}};
  auto r = solve_lp(a, vq({q(1), q(2), q(3)}), vq({q(1), q(2), q(0)}));
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == 1);
  CHECK(r.x[2] == 3);
}

TEST_CASE("floating simplex matches exact simplex on random programs", "[simplex][property]") {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 2 + rng.below(3), k = m + 2 + rng.below(4);
    Matrix<Q> a(m, k);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k; ++j) a(i, j) = q(rng.range(-4, 6));
    // b = A x0 for a positive x0 keeps the program feasible
    VQ x0(k), c(k);
    for (std::size_t j = 0; j < k; ++j) {
      x0[j] = q(rng.range(1, 3));
      c[j] = q(rng.range(0, 5));
    }
    const VQ b = a * x0;
    auto exact = solve_lp(a, b, c);
    auto fl = solve_lp(to_double(a), to_double(b), to_double(c));
    REQUIRE(exact.status == LpStatus::optimal);
    REQUIRE(fl.status == LpStatus::optimal);
    CHECK(fl.objective == Catch::Approx(exact.objective.get_d()).margin(1e-9));
    CHECK(a * exact.x == b);
  }
}
