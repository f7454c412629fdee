#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "minex/constructions.hpp"
#include "minex/io.hpp"
#include "test_support.hpp"

using namespace minex;
using namespace minex::test;

namespace {

template <Scalar T>
NormSpec<T> round_trip(const NormSpec<T>& n) {
  return norm_from_json<T>(Json::parse(norm_to_json(n).dump()));
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("fnv1a reference values", "[io]") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64_hex("a") == "fnv1a64:af63dc4c8601ec8c");
}

TEST_CASE("parse errors carry a position", "[io][errors]") {
  const std::string text = "{\n  \"type\": ,\n}";
  const auto msg = message_of([&] { parse_json(text, "norm.json"); });
  CHECK(msg.rfind("norm.json: line 2, column ", 0) == 0);
  CHECK_THROWS_AS(parse_json("[1, 2", "x"), InputError);
  CHECK(parse_json("{\"a\": 1}", "x")["a"] == 1);
}

TEST_CASE("scalars", "[io]") {
  CHECK(scalar_to_json(q(-7, 3)) == "-7/3");
  CHECK(scalar_from_json<Q>(Json("-7/3"), "$") == q(-7, 3));
  CHECK(scalar_from_json<Q>(Json(4), "$") == 4);
  CHECK(scalar_from_json<Q>(Json("0.125"), "$") == q(1, 8));
  CHECK(scalar_from_json<double>(Json("1/4"), "$") == 0.25);
  CHECK(scalar_from_json<double>(Json(0.5), "$") == 0.5);
  CHECK_THROWS_AS(scalar_from_json<Q>(Json(0.5), "$"), InputError);
  CHECK_THROWS_AS(scalar_from_json<Q>(Json("1/0"), "$"), InputError);
  CHECK_THROWS_AS(scalar_from_json<Q>(Json(true), "$"), InputError);
}

TEST_CASE("norm documents round-trip", "[io][property]") {
  Rng rng(71);
  std::vector<NormSpec<Q>> norms{NormSpec<Q>::linf(3), NormSpec<Q>::l1(2), NormSpec<Q>::lp(q(3, 2), 4),
                                 rational_hexagon_norm<Q>()};
  norms.push_back(NormSpec<Q>::transformed(NormSpec<Q>::linf(3), random_invertible_rational(3, rng)));
  norms.push_back(NormSpec<Q>::transformed(rational_hexagon_norm<Q>(), random_invertible_rational(2, rng)));
  for (const auto& n : norms) {
    const auto back = round_trip(n);
    CHECK(back.describe() == n.describe());
    CHECK(norm_to_json(back) == norm_to_json(n));
    for (int t = 0; t < 20; ++t) {
      const VQ x = rng.cube_point<Q>(n.dim());
      if (n.exactly_evaluable()) CHECK(evaluate_norm(back, x) == evaluate_norm(n, x));
    }
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto n = random_polytopal_norm(2 + seed % 2, 3 + seed % 4, seed);
    const auto back = round_trip(n);
    CHECK(back.vertices() == n.vertices());
  }
}

TEST_CASE("norm document errors", "[io][errors]") {
  CHECK_THROWS_AS(norm_from_json<Q>(Json::parse(R"({"dim": 2})")), InputError);
  CHECK_THROWS_AS(norm_from_json<Q>(Json::parse(R"({"type": "lq", "dim": 2})")), InputError);
  CHECK_THROWS_AS(norm_from_json<Q>(Json::parse(R"({"type": "lp", "p": "1/2", "dim": 2})")), InputError);
  CHECK_THROWS_AS(norm_from_json<Q>(Json::parse(R"({"type": "lp", "p": 2.5, "dim": 2})")), InputError);
  CHECK_THROWS_AS(norm_from_json<Q>(Json::parse(R"({"type": "linf", "dim": 0})")), InputError);
  CHECK_THROWS_AS(norm_from_json<Q>(Json::parse(R"({"type": "polytopal", "vertices": [[1, 0], [-1, 0]]})")),
                  InputError);
  const auto msg = message_of([] {
    norm_from_json<Q>(Json::parse(R"({"type": "transformed", "base": {"type": "linf", "dim": 2},
                                     "matrix": [[1, 2], [2, 4]]})"));
  });
  CHECK(msg.find("singular") != std::string::npos);
  CHECK(norm_from_json<Q>(Json::parse(R"({"type": "lp", "p": "inf", "dim": 2})")).kind() == NormKind::linf);
}

TEST_CASE("set documents round-trip", "[io][property]") {
  for (std::size_t n : {1, 2, 4, 8}) {
    const auto s = theorem1_set(n);
    const auto j = Json::parse(set_to_json(s).dump());
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(set_document_mode(j) == ScalarMode::exact);
    const auto back = set_from_document<Q>(j);
    CHECK(back.vectors() == s.vectors());
    CHECK(back.norm().describe() == s.norm().describe());
  }
  const auto f = to_double(linf_canonical(3));
  const auto jf = set_to_json(f);
  CHECK(set_document_mode(jf) == ScalarMode::floating);
  CHECK(set_from_document<double>(jf).vectors() == f.vectors());
  // exact documents read in floating mode and back
  CHECK(set_from_document<Q>(jf).vectors() == linf_canonical(3).vectors());
}

TEST_CASE("set documents inside reports", "[io]") {
  Json report;
  report["schema_version"] = kSchemaVersion;
  report["set"] = set_to_json(linf_canonical(2));
  CHECK(set_from_document<Q>(report).size() == 4);
  CHECK(norm_from_document<Q>(report).kind() == NormKind::linf);
  CHECK_THROWS_AS(set_from_document<Q>(Json::parse(R"({"a": 1})")), InputError);
}

TEST_CASE("set document errors", "[io][errors]") {
  auto doc = Json::parse(R"({"kind": "vector_set", "vectors": [[1, 0], [0, 1]]})");
  CHECK_THROWS_AS(set_from_document<Q>(doc), InputError);
  CHECK(set_from_document<Q>(doc, NormSpec<Q>::linf(2)).size() == 2);
  CHECK_THROWS_AS(set_from_document<Q>(doc, NormSpec<Q>::linf(3)), InputError);

  const auto bad = Json::parse(R"({"kind": "vector_set", "norm": {"type": "linf", "dim": 2},
                                   "vectors": [[1, 0], ["1/2", "1/2"]]})");
  const auto msg = message_of([&] { set_from_document<Q>(bad); });
  CHECK(msg.find("not a unit vector") != std::string::npos);

  const auto dup = Json::parse(R"({"kind": "vector_set", "norm": {"type": "linf", "dim": 2},
                                   "vectors": [[1, 0], [1, 0]]})");
  CHECK_THROWS_AS(set_from_document<Q>(dup), InputError);
}

TEST_CASE("report documents", "[io]") {
  const auto rep = check_strong_collapsing(theorem1_set(4));
  const auto j = condition_report_to_json(rep);
  CHECK(j["condition"] == "A");
  CHECK(j["passed"] == false);
  CHECK(j["witness_subset"].size() >= 2);

  const auto cert = detect_linf_isometry(linf_canonical(2));
  const auto c = certificate_to_json(cert);
  CHECK(c["verdict"] == "certified-exact");
  CHECK(c["residual"] == "0");
  CHECK(c["map"].size() == 2);

  const auto t = bound_table(3, {Q(2)});
  const auto bj = bound_table_to_json(t);
  CHECK(bj["bound_A"] == 6.0);
  CHECK(bj["r_values"][0]["p"] == "2");
  const auto csv = bound_table_csv(t);
  CHECK(csv.rfind("quantity,value\n", 0) == 0);
  CHECK(csv.find("bound_Aprime,16\n") != std::string::npos);
  CHECK(csv.find("bound_r(2),") != std::string::npos);
}
