#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "minex/certificates.hpp"
#include "minex/constructions.hpp"
#include "test_support.hpp"

using namespace minex;
using namespace minex::test;

namespace {

VectorSet<Q> transformed_linf_set(const Matrix<Q>& m) {
  const std::size_t n = m.rows();
  const auto norm = NormSpec<Q>::transformed(NormSpec<Q>::linf(n), m);
  std::vector<VQ> s;
  for (std::size_t i = 0; i < n; ++i) {
    const VQ x = norm.inverse_matrix() * VQ::unit(n, i);
    s.push_back(x);
    s.push_back(-x);
  }
  return VectorSet<Q>(std::move(s), norm);
}

}  // namespace

TEST_CASE("subset sums of small half-sets", "[certificates]") {
  const auto t = subset_sum_set(std::vector<VQ>{vq({1, 0}), vq({0, 1})});
  CHECK(t == std::vector<VQ>{vq({0, 0}), vq({1, 0}), vq({0, 1}), vq({1, 1})});
  CHECK(subset_sum_set(std::vector<VQ>{}, 3) == std::vector<VQ>{VQ(3)});
  const auto h = theorem1_set(2);
  const auto u = subset_sum_set(std::vector<VQ>{h[0], h[2]});
  CHECK(u == std::vector<VQ>{vq({0, 0}), vq({q(1, 2), q(1, 2)}), vq({q(1, 2), q(-1, 2)}), vq({1, 0})});
  CHECK_THROWS_AS(subset_sum_set(std::vector<VQ>(17, VQ(1))), Error);
}

TEST_CASE("equilateral checks", "[certificates]") {
  const auto t = subset_sum_set(std::vector<VQ>{vq({1, 0}), vq({0, 1})});
  const auto rep = check_equilateral(t, NormSpec<Q>::linf(2));
  CHECK(rep.passed);
  CHECK(rep.pairs_checked == 6);
  CHECK(rep.petty_case);

  CHECK(check_equilateral(std::vector<VD>{VD{0, 0}, VD{1, 0}}, NormSpec<double>::l2(2)).passed);
  const auto bad = check_equilateral(std::vector<VD>{VD{0, 0}, VD{2, 0}}, NormSpec<double>::l2(2));
  CHECK_FALSE(bad.passed);
  CHECK(*bad.worst_distance == Catch::Approx(2.0));
  CHECK_FALSE(bad.petty_case);
}

TEST_CASE("canonical linf sets are certified with the identity map", "[certificates][property]") {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto cert = detect_linf_isometry(linf_canonical(n));
    CHECK(cert.verdict == IsometryVerdict::certified_exact);
    REQUIRE(cert.map);
    CHECK(*cert.map == Matrix<Q>::identity(n));
    CHECK(*cert.residual == 0);
  }
}

TEST_CASE("transformed linf sets map onto the standard cross", "[certificates][property]") {
  Rng rng(61);
  for (int t = 0; t < 6; ++t) {
    const std::size_t n = 2 + t % 3;
    const auto s = transformed_linf_set(random_invertible_rational(n, rng));
    const auto cert = detect_linf_isometry(s);
    REQUIRE(cert.verdict == IsometryVerdict::certified_exact);
    CHECK(*cert.residual == 0);
    std::vector<VQ> image;
    for (const auto& x : s.vectors()) image.push_back(*cert.map * x);
    std::sort(image.begin(), image.end());
    std::vector<VQ> cross;
    for (std::size_t i = 0; i < n; ++i) {
      cross.push_back(VQ::unit(n, i, 1));
      cross.push_back(VQ::unit(n, i, -1));
    }
    std::sort(cross.begin(), cross.end());
    CHECK(image == cross);
    CHECK(cert.equilateral->passed);
    CHECK(cert.equilateral->pairs_checked == (std::uint64_t{1} << n) * ((std::uint64_t{1} << n) - 1) / 2);
  }
}

TEST_CASE("l1 Hadamard set is refuted at the precondition", "[certificates]") {
  const auto cert = detect_linf_isometry(theorem1_set(4));
  CHECK(cert.verdict == IsometryVerdict::refuted);
  CHECK(cert.stage == 0);
  CHECK(cert.witness_subset);
}

TEST_CASE("l1 at n = 2 is isometric to linf", "[certificates]") {
  // the rotated square {+-(1/2, 1/2), +-(1/2, -1/2)} is an (A)-set of size 4
  const auto cert = detect_linf_isometry(theorem1_set(2));
  CHECK(cert.verdict == IsometryVerdict::certified_exact);
}

TEST_CASE("precondition refutations", "[certificates]") {
  const VectorSet<Q> small({vq({1, 0}), vq({-1, 0})}, NormSpec<Q>::linf(2));
  const auto a = detect_linf_isometry(small);
  CHECK(a.verdict == IsometryVerdict::refuted);
  CHECK(a.stage == 0);

  // (1, 0) + (0, -1) lies outside the hexagon
  const VectorSet<Q> h({vq({1, 0}), vq({-1, 0}), vq({0, 1}), vq({0, -1})}, rational_hexagon_norm<Q>());
  const auto c = detect_linf_isometry(h);
  CHECK(c.verdict == IsometryVerdict::refuted);
  CHECK(c.stage == 0);
  CHECK(c.witness_subset);
}

TEST_CASE("floating sets get at most a sampled certificate", "[certificates]") {
  const auto s = linf_canonical<double>(3);
  IsometryOptions opt;
  opt.samples = 2000;
  opt.seed = 5;
  const auto cert = detect_linf_isometry(s, opt);
  CHECK(cert.verdict == IsometryVerdict::certified_sampled);
  CHECK(cert.samples == 2000);
  CHECK(*cert.residual <= 1e-12);
}

TEST_CASE("separation constants", "[certificates]") {
  const double sqrt3 = std::sqrt(3.0);
  for (std::size_t n : {2, 3, 4}) {
    const auto r = min_difference_norm(Q(2), n, 7, 16);
    CHECK(std::fabs(r.value - sqrt3) <= 1e-3);
    const auto norm = NormSpec<double>::l2(n);
    CHECK(std::fabs(evaluate_norm(norm, r.x) - 1.0) <= 1e-12);
    CHECK(std::fabs(evaluate_norm(norm, r.y) - 1.0) <= 1e-12);
    CHECK(evaluate_norm(norm, r.x + r.y) <= 1.0);
  }
  // the returned value is attained, so it can only sit above the quoted lower bounds
  CHECK(min_difference_norm(Q(4), 3, 7, 16).value >= std::pow(3.0, 0.25) - 1e-3);
  CHECK(min_difference_norm(q(3, 2), 3, 7, 16).value >= std::pow(std::pow(2.0, 1.5) - 1.0, 2.0 / 3.0) - 1e-3);
  CHECK(separation_constant(Q(2)) == Catch::Approx(sqrt3));
  CHECK_THROWS_AS(min_difference_norm(Q(1), 3, 0), Error);
  CHECK_THROWS_AS(min_difference_norm(Q(2), 1, 0), Error);
}

TEST_CASE("l1 sign patterns", "[certificates]") {
  const VectorSet<Q> axes({vq({1, 0}), vq({-1, 0}), vq({0, 1}), vq({0, -1})}, NormSpec<Q>::l1(2));
  const auto a = l1_sign_pattern_check(axes);
  CHECK(a.passed);
  CHECK(a.zero_coordinate.size() == 4);
  CHECK(a.zero_free == 0);

  const auto b = l1_sign_pattern_check(theorem1_set(2));
  CHECK(b.passed);
  CHECK(b.patterns == std::vector<std::string>{"++", "--", "+-", "-+"});

  const VectorSet<Q> dup({vq({q(1, 2), q(1, 2)}), vq({q(1, 4), q(3, 4)})}, NormSpec<Q>::l1(2));
  const auto c = l1_sign_pattern_check(dup);
  CHECK_FALSE(c.passed);
  CHECK(*c.duplicate == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(*c.duplicate_sum_norm == Catch::Approx(2.0));

  CHECK_THROWS_AS(l1_sign_pattern_check(linf_canonical(2)), Error);
}

TEST_CASE("linf pigeonhole", "[certificates]") {
  const auto a = linf_pigeonhole_check(linf_canonical(3));
  CHECK(a.passed);
  CHECK(a.slots_used == 6);

  const VectorSet<Q> bad({vq({1, 0}), vq({1, q(1, 2)})}, NormSpec<Q>::linf(2));
  const auto b = linf_pigeonhole_check(bad);
  CHECK_FALSE(b.passed);
  CHECK(b.collision->coordinate == 0);
  CHECK(b.collision->sign == 1);
  CHECK(*b.colliding_sum_norm == Catch::Approx(2.0));

  const VectorSet<Q> anti({vq({1, 0}), vq({-1, 0})}, NormSpec<Q>::linf(2));
  CHECK(linf_pigeonhole_check(anti).passed);

  const VectorSet<double> near({VD{1.0 - 1e-10, 0.3}, VD{1.0, -0.2}}, NormSpec<double>::linf(2));
  CHECK_FALSE(linf_pigeonhole_check(near).passed);

  CHECK_THROWS_AS(linf_pigeonhole_check(theorem1_set(2)), Error);
}

TEST_CASE("bound table closed forms", "[certificates]") {
  const auto t3 = bound_table(3);
  CHECK(t3.bound_A == 6);
  CHECK(t3.bound_Aprime == 16);
  CHECK(t3.bound_linear_A == Catch::Approx(9.3429).margin(1e-3));
  CHECK(t3.linear_cap == Catch::Approx(10.0462).margin(1e-3));
  CHECK(t3.linear_comparison);

  const auto t1 = bound_table(1);
  CHECK(t1.bound_A == 2);
  CHECK(t1.bound_Aprime == 4);

  const auto t2 = bound_table(2, {Q(2), q(3, 2), Q(4)});
  REQUIRE(t2.r_values.size() == 3);
  CHECK(t2.r_values[0].r == Catch::Approx(std::sqrt(3.0)));
  CHECK(t2.r_values[0].bound == Catch::Approx(2.0 * std::pow(1.0 + 1.0 / std::sqrt(3.0), 2) + 1.0));
  CHECK(t2.r_values[0].bound == Catch::Approx(5.976).margin(1e-3));

  CHECK_THROWS_AS(bound_table(0), Error);
  CHECK_THROWS_AS(bound_table(2, {Q(1)}), Error);
}

TEST_CASE("bound table is monotone in n", "[certificates][property]") {
  for (std::size_t n = 1; n < 10; ++n) {
    const auto a = bound_table(n), b = bound_table(n + 1);
    CHECK(a.bound_A < b.bound_A);
    CHECK(a.bound_Aprime < b.bound_Aprime);
    CHECK(a.bound_linear_A < b.bound_linear_A);
    CHECK(b.linear_comparison);
  }
}
