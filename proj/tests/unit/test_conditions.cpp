#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "minex/conditions.hpp"
#include "minex/constructions.hpp"
#include "test_support.hpp"

using namespace minex;
using namespace minex::test;

TEST_CASE("strong collapsing on the reference examples", "[conditions]") {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto rep = check_strong_collapsing(linf_canonical(n));
    CHECK(rep.passed);
    REQUIRE(rep.max_subset_norm);
    CHECK(*rep.max_subset_norm == 1);
    CHECK(rep.subsets_examined == (std::uint64_t{1} << (2 * n)));
  }

  const VectorSet<double> s({VD{1.0, 0.0}, VD{0.0, 1.0}}, NormSpec<double>::l2(2));
  const auto rep = check_strong_collapsing(s);
  CHECK_FALSE(rep.passed);
  CHECK(rep.subset == std::vector<std::size_t>{0, 1});
  CHECK(*rep.subset_norm == Catch::Approx(std::sqrt(2.0)));

  const VectorSet<Q> single({vq({q(1, 3), q(2, 3)})}, NormSpec<Q>::l1(2));
  CHECK(check_strong_collapsing(single).passed);
}

TEST_CASE("strong collapsing rejects sets over the enumeration guard", "[conditions][errors]") {
  const auto s = linf_canonical(4);
  CheckOptions opt;
  opt.enumeration_guard = 7;
  CHECK_THROWS_AS(check_strong_collapsing(s, opt), Error);
}

TEST_CASE("weak collapsing on the reference examples", "[conditions]") {
  const auto t = check_weak_collapsing(theorem1_set(2));
  CHECK(t.passed);
  CHECK(*t.max_subset_norm == 1);

  const VectorSet<Q> anti({vq({1, 0}), vq({-1, 0})}, NormSpec<Q>::l1(2));
  CHECK(check_weak_collapsing(anti).passed);

  const VectorSet<Q> bad({vq({1, 0}), vq({0, 1})}, NormSpec<Q>::l1(2));
  const auto rep = check_weak_collapsing(bad);
  CHECK_FALSE(rep.passed);
  CHECK(rep.subset == std::vector<std::size_t>{0, 1});
  CHECK(*rep.subset_norm == 2);
}

TEST_CASE("strong balancing on the reference examples", "[conditions]") {
  CHECK(check_strong_balancing(linf_canonical(3)).passed);
  CHECK(check_strong_balancing(theorem1_set(4)).passed);
  const VectorSet<Q> one({vq({1, 0})}, NormSpec<Q>::linf(2));
  const auto rep = check_strong_balancing(one);
  CHECK_FALSE(rep.passed);
  CHECK(*rep.sum == vq({1, 0}));
}

TEST_CASE("weak balancing on the reference examples", "[conditions]") {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto rep = check_weak_balancing(linf_canonical(n));
    REQUIRE(rep.passed);
    for (const auto& l : rep.coefficients) CHECK(l == Q(1, static_cast<long>(2 * n)));
  }

  const VectorSet<Q> one({vq({1, 0})}, NormSpec<Q>::linf(2));
  const auto f = check_weak_balancing(one);
  CHECK_FALSE(f.passed);
  REQUIRE(f.separating_functional);
  CHECK(dot(*f.separating_functional, vq({1, 0})) == 1);

  const double r = 1.0 / std::sqrt(2.0);
  const VectorSet<double> tri({VD{1.0, 0.0}, VD{0.0, 1.0}, VD{-r, -r}}, NormSpec<double>::l2(2));
  const auto t = check_weak_balancing(tri);
  CHECK(t.passed);
  CHECK(*t.delta > 0.0);
}

TEST_CASE("weak balancing works inside a lower-dimensional span", "[conditions]") {
  // {+-e_1} in R^3 lies on a line; 0 is in its relative interior.
  const VectorSet<Q> line({vq({1, 0, 0}), vq({-1, 0, 0})}, NormSpec<Q>::linf(3));
  const auto rep = check_weak_balancing(line);
  CHECK(rep.passed);
  CHECK(*rep.delta == q(1, 2));

  // {e1, -e1, e2}: 0 is on the boundary of the triangle, not inside.
  const VectorSet<Q> tri({vq({1, 0}), vq({-1, 0}), vq({0, 1})}, NormSpec<Q>::linf(2));
  const auto b = check_weak_balancing(tri);
  CHECK_FALSE(b.passed);
  CHECK(*b.delta == 0);
}

TEST_CASE("weak balancing coefficients certify the combination", "[conditions][property]") {
  const auto s = theorem1_set(8);
  const auto rep = check_weak_balancing(s);
  REQUIRE(rep.passed);
  VQ acc(8);
  Q total(0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    acc += s[i] * rep.coefficients[i];
    total += rep.coefficients[i];
    CHECK(rep.coefficients[i] >= *rep.delta);
  }
  CHECK(acc.is_zero());
  CHECK(total == 1);
}

TEST_CASE("VectorSet enforces its invariants", "[conditions][errors]") {
  CHECK_THROWS_AS(VectorSet<Q>({vq({1, 1})}, NormSpec<Q>::l1(2)), Error);
  CHECK_THROWS_AS(VectorSet<Q>({vq({1, 0}), vq({1, 0})}, NormSpec<Q>::l1(2)), Error);
  CHECK_THROWS_AS(VectorSet<Q>({vq({1, 0, 0})}, NormSpec<Q>::l1(2)), DimensionError);
  CHECK_NOTHROW(VectorSet<double>({VD{1.0 + 1e-11, 0.0}}, NormSpec<double>::l1(2)));
  CHECK_THROWS_AS(parse_condition("C"), Error);
  CHECK(parse_condition("A'") == Condition::A_prime);
}

namespace {

// Random rational points on the l_inf or l_1 unit sphere.
VectorSet<Q> random_exact_set(Rng& rng, std::size_t n, std::size_t m, bool linf) {
  std::vector<VQ> vs;
  for (int attempt = 0; vs.size() < m && attempt < 10000; ++attempt) {
    VQ x = rng.cube_point<Q>(n, 4);
    if (x.is_zero()) continue;
    x /= linf ? oracle_linf(x) : oracle_l1(x);
    bool dup = false;
    for (const auto& y : vs) dup = dup || y == x;
    if (!dup) vs.push_back(x);
  }
  return VectorSet<Q>(std::move(vs), linf ? NormSpec<Q>::linf(n) : NormSpec<Q>::l1(n));
}

}  // namespace

TEST_CASE("Gray-code enumeration matches the naive enumerator", "[conditions][property]") {
  Rng rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.below(2);
    const std::size_t m = 1 + rng.below(10);
    const auto s = random_exact_set(rng, n, m, trial % 2 == 0);
    CheckOptions opt;
    opt.chunk_size = 1 + rng.below(64);
    opt.threads = 1 + static_cast<unsigned>(rng.below(4));
    CHECK(check_strong_collapsing(s, opt) == naive_strong_collapsing(s));
  }
}

TEST_CASE("Gray-code verdict is independent of the worker count", "[conditions][property]") {
  const auto s = theorem1_set(8);
  CheckOptions one, many;
  one.threads = 1;
  many.threads = 8;
  one.chunk_size = many.chunk_size = 256;
  CHECK(check_strong_collapsing(s, one) == check_strong_collapsing(s, many));
}

TEST_CASE("strong collapsing implies weak collapsing", "[conditions][property]") {
  Rng rng(103);
  for (int trial = 0; trial < 80; ++trial) {
    const auto s = random_exact_set(rng, 2, 1 + rng.below(5), trial % 3 != 0);
    if (check_strong_collapsing(s).passed) CHECK(check_weak_collapsing(s).passed);
  }
}

TEST_CASE("strong balancing implies weak balancing", "[conditions][property]") {
  Rng rng(107);
  for (int trial = 0; trial < 40; ++trial) {
    const auto half = random_exact_set(rng, 3, 1 + rng.below(3), true);
    std::vector<VQ> vs;
    for (const auto& x : half.vectors()) {
      vs.push_back(x);
      vs.push_back(-x);
    }
    bool distinct = true;
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) distinct = distinct && !(vs[i] == vs[j]);
    if (!distinct) continue;
    const VectorSet<Q> s(vs, NormSpec<Q>::linf(3));
    REQUIRE(check_strong_balancing(s).passed);
    CHECK(check_weak_balancing(s).passed);
  }
}
