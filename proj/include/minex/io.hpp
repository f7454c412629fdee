#pragma once

// JSON documents for norms, vector sets and reports; CSV for bound tables.
// Exact scalars are written as "p/q" strings, floating ones as numbers.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "minex/auerbach.hpp"
#include "minex/certificates.hpp"
#include "minex/conditions.hpp"
#include "minex/norms.hpp"
#include "minex/scalar.hpp"
#include "minex/search.hpp"
#include "minex/volume.hpp"

namespace minex {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent input document.
class InputError : public Error {
 public:
  using Error::Error;
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

/// Parses text, turning parser errors into "<source>: line L, column C: ...".
inline Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    // drop the library's own "[json.exception...] parse error at line L, column C: " prefix
    if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    if (what.rfind("parse error at line", 0) == 0)
      if (auto colon = what.find(": "); colon != std::string::npos) what = what.substr(colon + 2);
    throw InputError(source + ": line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ---- scalars, vectors, matrices

template <Scalar T>
Json scalar_to_json(const T& x) {
  if constexpr (is_exact_v<T>) {
    return to_string(x);
  } else {
    return x;
  }
}

template <Scalar T>
T scalar_from_json(const Json& j, const std::string& path) {
  if (j.is_string()) {
    Rational q;
    try {
      q = parse_rational(j.get<std::string>());
    } catch (const Error& e) {
      throw InputError(path + ": " + e.what());
    }
    return from_rational<T>(q);
  }
  if (j.is_number_integer()) {
    if constexpr (is_exact_v<T>) {
      return j.is_number_unsigned() ? Rational(mpz_class(std::to_string(j.get<std::uint64_t>())))
                                    : Rational(mpz_class(std::to_string(j.get<std::int64_t>())));
    } else {
      return j.get<double>();
    }
  }
  if (j.is_number_float()) {
    if constexpr (is_exact_v<T>) {
      const double d = j.get<double>();
      if (std::isfinite(d) && d == std::trunc(d)) return rational_from_double(d);
      throw InputError(path + ": non-integer number in exact mode; write rationals as \"p/q\" strings");
    } else {
      return j.get<double>();
    }
  }
  throw InputError(path + ": expected a number or a rational string");
}

template <Scalar T>
Json vector_to_json(const Vector<T>& v) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back(scalar_to_json(c));
  return a;
}

template <Scalar T>
Vector<T> vector_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path + ": expected an array of coordinates");
  Vector<T> v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = scalar_from_json<T>(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

template <Scalar T>
Json matrix_to_json(const Matrix<T>& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vector_to_json(m.row(i)));
  return a;
}

template <Scalar T>
Matrix<T> matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw InputError(path + ": expected a nonempty array of rows");
  std::vector<Vector<T>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    rows.push_back(vector_from_json<T>(j[i], path + "[" + std::to_string(i) + "]"));
    if (rows.back().dim() != rows.front().dim()) throw InputError(path + ": rows have different lengths");
  }
  return Matrix<T>::from_rows(std::span<const Vector<T>>(rows));
}

template <Scalar T>
Json vectors_to_json(const std::vector<Vector<T>>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(vector_to_json(v));
  return a;
}

template <Scalar T>
Json optional_scalar(const std::optional<T>& x) {
  return x ? scalar_to_json(*x) : Json(nullptr);
}

inline Json indices_to_json(const std::vector<std::size_t>& idx) {
  Json a = Json::array();
  for (auto i : idx) a.push_back(i);
  return a;
}

// ---- norms

template <Scalar T>
Json norm_to_json(const NormSpec<T>& norm) {
  Json j;
  switch (norm.kind()) {
    case NormKind::lp:
      j["type"] = "lp";
      j["p"] = to_string(norm.p());
      break;
    case NormKind::linf: j["type"] = "linf"; break;
    case NormKind::polytopal: j["type"] = "polytopal"; break;
    case NormKind::transformed: j["type"] = "transformed"; break;
  }
  j["dim"] = norm.dim();
  if (norm.kind() == NormKind::polytopal) j["vertices"] = vectors_to_json(norm.vertices());
  if (norm.kind() == NormKind::transformed) {
    j["matrix"] = matrix_to_json(norm.matrix());
    j["base"] = norm_to_json(norm.base());
  }
  return j;
}

namespace detail {

inline const Json& member(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw InputError(path + ": missing field '" + key + "'");
  return j[key];
}

inline std::size_t dim_field(const Json& j, const std::string& path) {
  const Json& d = member(j, "dim", path);
  if (!d.is_number_unsigned() || d.get<std::uint64_t>() == 0)
    throw InputError(path + ".dim: expected a positive integer");
  return static_cast<std::size_t>(d.get<std::uint64_t>());
}

}  // namespace detail

template <Scalar T>
NormSpec<T> norm_from_json(const Json& j, const std::string& path = "$") {
  if (!j.is_object()) throw InputError(path + ": a norm must be a JSON object");
  const Json& type = detail::member(j, "type", path);
  if (!type.is_string()) throw InputError(path + ".type: expected a string");
  const std::string t = type.get<std::string>();
  try {
    NormSpec<T> out = [&]() -> NormSpec<T> {
      if (t == "linf") return NormSpec<T>::linf(detail::dim_field(j, path));
      if (t == "lp") {
        const Json& p = detail::member(j, "p", path);
        if (p.is_string() && (p.get<std::string>() == "inf" || p.get<std::string>() == "infinity"))
          return NormSpec<T>::linf(detail::dim_field(j, path));
        if (p.is_number_float()) throw InputError(path + ".p: write p as an integer or a \"p/q\" string");
        return NormSpec<T>::lp(scalar_from_json<Rational>(p, path + ".p"), detail::dim_field(j, path));
      }
      if (t == "polytopal") {
        const Json& vs = detail::member(j, "vertices", path);
        if (!vs.is_array()) throw InputError(path + ".vertices: expected an array");
        std::vector<Vector<T>> verts;
        for (std::size_t i = 0; i < vs.size(); ++i)
          verts.push_back(vector_from_json<T>(vs[i], path + ".vertices[" + std::to_string(i) + "]"));
        return NormSpec<T>::polytopal(std::move(verts));
      }
      if (t == "transformed") {
        const NormSpec<T> base = norm_from_json<T>(detail::member(j, "base", path), path + ".base");
        return NormSpec<T>::transformed(base, matrix_from_json<T>(detail::member(j, "matrix", path), path + ".matrix"));
      }
      throw InputError(path + ".type: unknown norm type '" + t + "' (expected lp, linf, polytopal, transformed)");
    }();
    if (j.contains("dim") && detail::dim_field(j, path) != out.dim())
      throw InputError(path + ".dim: declared dimension differs from the data");
    return out;
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

/// The norm of a document: a bare norm, or the "norm" member of a set or a
/// report carrying one.
template <Scalar T>
NormSpec<T> norm_from_document(const Json& doc) {
  if (doc.is_object() && doc.contains("type")) return norm_from_json<T>(doc, "$");
  if (doc.is_object() && doc.contains("norm")) return norm_from_json<T>(doc["norm"], "$.norm");
  if (doc.is_object() && doc.contains("set") && doc["set"].is_object() && doc["set"].contains("norm"))
    return norm_from_json<T>(doc["set"]["norm"], "$.set.norm");
  throw InputError("$: document holds no norm");
}

// ---- vector sets

template <Scalar T>
Json set_to_json(const VectorSet<T>& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "vector_set";
  j["mode"] = scalar_traits<T>::name;
  j["dim"] = s.dim();
  j["size"] = s.size();
  j["norm"] = norm_to_json(s.norm());
  j["vectors"] = vectors_to_json(s.vectors());
  return j;
}

namespace detail {

inline std::pair<const Json*, std::string> locate_set(const Json& doc) {
  if (doc.is_object() && doc.value("kind", "") == "vector_set") return {&doc, "$"};
  if (doc.is_object() && doc.contains("set") && doc["set"].is_object()) return {&doc["set"], "$.set"};
  throw InputError("$: document holds no vector set (expected kind \"vector_set\" or a \"set\" member)");
}

}  // namespace detail

/// Mode recorded in a set document ("exact" when absent).
inline ScalarMode set_document_mode(const Json& doc) {
  const auto [j, path] = detail::locate_set(doc);
  if (!j->contains("mode")) return ScalarMode::exact;
  try {
    return parse_mode((*j)["mode"].get<std::string>());
  } catch (const std::exception& e) {
    throw InputError(path + ".mode: " + e.what());
  }
}

template <Scalar T>
VectorSet<T> set_from_document(const Json& doc, const std::optional<NormSpec<T>>& norm_override = std::nullopt) {
  const auto [j, path] = detail::locate_set(doc);
  NormSpec<T> norm = norm_override ? *norm_override : [&] {
    if (!j->contains("norm")) throw InputError(path + ": set carries no norm; pass one separately");
    return norm_from_json<T>((*j)["norm"], path + ".norm");
  }();
  const Json& vs = detail::member(*j, "vectors", path);
  if (!vs.is_array()) throw InputError(path + ".vectors: expected an array");
  std::vector<Vector<T>> xs;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    xs.push_back(vector_from_json<T>(vs[i], path + ".vectors[" + std::to_string(i) + "]"));
    if (xs.back().dim() != norm.dim())
      throw InputError(path + ".vectors[" + std::to_string(i) + "]: dimension " + std::to_string(xs.back().dim()) +
                       " differs from the norm dimension " + std::to_string(norm.dim()));
  }
  if (j->contains("dim") && detail::dim_field(*j, path) != norm.dim())
    throw InputError(path + ".dim: declared dimension differs from the norm");
  try {
    return VectorSet<T>(std::move(xs), norm);
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

// ---- reports

template <Scalar T>
Json condition_report_to_json(const ConditionReport<T>& r) {
  Json j;
  j["condition"] = condition_name(r.condition);
  j["passed"] = r.passed;
  switch (r.condition) {
    case Condition::A:
    case Condition::A_prime:
      j["subsets_examined"] = r.subsets_examined;
      if (!r.passed) {
        j["witness_subset"] = indices_to_json(r.subset);
        j["witness_norm"] = optional_scalar(r.subset_norm);
      } else {
        j["max_subset_norm"] = optional_scalar(r.max_subset_norm);
      }
      break;
    case Condition::B:
      if (r.sum) j["sum"] = vector_to_json(*r.sum);
      j["sum_norm"] = optional_scalar(r.sum_norm);
      break;
    case Condition::B_prime: {
      j["delta"] = optional_scalar(r.delta);
      Json c = Json::array();
      for (const auto& x : r.coefficients) c.push_back(scalar_to_json(x));
      j["coefficients"] = c;
      if (r.separating_functional) j["separating_functional"] = vector_to_json(*r.separating_functional);
      break;
    }
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline Json search_result_to_json(const SearchResult& r) {
  Json j;
  j["condition"] = condition_name(r.condition);
  j["size"] = r.size;
  j["optimal"] = r.optimal;
  j["best_set"] = indices_to_json(r.best_set);
  j["nodes_explored"] = r.nodes_explored;
  j["pool_size"] = r.pool_size;
  j["clique_bound"] = r.clique_bound ? Json(*r.clique_bound) : Json(nullptr);
  j["wall_time_seconds"] = r.wall_time;
  return j;
}

inline Json pool_to_json(const CandidatePool& p) {
  Json j;
  j["generator"] = p.generator;
  j["resolution"] = p.resolution;
  j["size"] = p.size();
  j["rotation_seed"] = p.rotation_seed ? Json(*p.rotation_seed) : Json(nullptr);
  j["tolerance"] = p.tolerance;
  std::size_t exact = 0;
  for (const auto& e : p.exact) exact += e.has_value();
  j["exact_members"] = exact;
  return j;
}

template <Scalar T>
Json equilateral_to_json(const EquilateralReport<T>& r) {
  Json j;
  j["passed"] = r.passed;
  j["points"] = r.points;
  j["pairs_checked"] = r.pairs_checked;
  j["worst_pair"] = r.worst_pair ? Json::array({r.worst_pair->first, r.worst_pair->second}) : Json(nullptr);
  j["worst_distance"] = optional_scalar(r.worst_distance);
  j["petty_case"] = r.petty_case;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

template <Scalar T>
Json certificate_to_json(const IsometryCertificate<T>& c) {
  Json j;
  j["verdict"] = verdict_name(c.verdict);
  j["stage"] = c.stage;
  j["stage_name"] = isometry_stage_name(c.stage);
  j["message"] = c.message;
  Json pairs = Json::array();
  for (const auto& [a, b] : c.pairing) pairs.push_back(Json::array({a, b}));
  j["pairing"] = pairs;
  j["half"] = vectors_to_json(c.half);
  j["map"] = c.map ? matrix_to_json(*c.map) : Json(nullptr);
  j["residual"] = optional_scalar(c.residual);
  j["equilateral"] = c.equilateral ? equilateral_to_json(*c.equilateral) : Json(nullptr);
  j["witness_subset"] = c.witness_subset ? indices_to_json(*c.witness_subset) : Json(nullptr);
  j["samples"] = c.samples;
  return j;
}

inline Json sign_pattern_to_json(const SignPatternReport& r) {
  Json j;
  j["passed"] = r.passed;
  j["patterns"] = r.patterns;
  j["zero_coordinate"] = indices_to_json(r.zero_coordinate);
  j["zero_free"] = r.zero_free;
  j["bound_holds"] = r.bound_holds;
  j["duplicate"] = r.duplicate ? Json::array({r.duplicate->first, r.duplicate->second}) : Json(nullptr);
  j["duplicate_sum_norm"] = r.duplicate_sum_norm ? Json(*r.duplicate_sum_norm) : Json(nullptr);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline Json pigeonhole_to_json(const PigeonholeReport& r) {
  auto slot = [](const std::optional<PigeonholeSlot>& s) {
    return s ? Json{{"coordinate", s->coordinate}, {"sign", s->sign}} : Json(nullptr);
  };
  Json j;
  j["passed"] = r.passed;
  Json a = Json::array();
  for (const auto& s : r.assignment) a.push_back(slot(s));
  j["assignment"] = a;
  j["slots_used"] = r.slots_used;
  j["collision"] = slot(r.collision);
  j["colliding"] = r.colliding ? Json::array({r.colliding->first, r.colliding->second}) : Json(nullptr);
  j["colliding_sum_norm"] = r.colliding_sum_norm ? Json(*r.colliding_sum_norm) : Json(nullptr);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline Json separation_to_json(const SeparationResult& r) {
  Json j;
  j["value"] = r.value;
  j["x"] = vector_to_json(r.x);
  j["y"] = vector_to_json(r.y);
  j["restarts"] = r.restarts;
  j["evaluations"] = r.evaluations;
  return j;
}

template <Scalar T>
Json auerbach_frame_to_json(const AuerbachFrame<T>& f) {
  Json j;
  j["basis"] = vectors_to_json(f.basis);
  j["duals"] = vectors_to_json(f.duals);
  j["transform"] = matrix_to_json(f.transform);
  j["det"] = scalar_to_json(f.det);
  j["abs_det"] = std::fabs(to_double(f.det));
  j["log_det"] = f.log_det;
  j["det_history"] = f.det_history;
  j["restart"] = f.restart;
  j["sweeps"] = f.sweeps;
  return j;
}

inline Json auerbach_report_to_json(const AuerbachReport& r) {
  Json j;
  j["passed"] = r.passed;
  j["samples"] = r.samples;
  j["lower_violations"] = r.lower_violations;
  j["upper_violations"] = r.upper_violations;
  j["worst_lower_slack"] = r.worst_lower_slack;
  j["worst_upper_slack"] = r.worst_upper_slack;
  j["basis_unit_deviation"] = r.basis_unit_deviation;
  j["dual_norm_deviation"] = r.dual_norm_deviation;
  j["biorthogonality_error"] = r.biorthogonality_error;
  if (!r.diagnosis.empty()) j["diagnosis"] = r.diagnosis;
  return j;
}

inline Json volume_estimate_to_json(const VolumeEstimate& v) {
  Json j;
  j["value"] = v.value;
  j["standard_error"] = v.standard_error;
  j["samples"] = v.samples;
  j["hits"] = v.hits;
  j["seed"] = v.seed;
  j["box_lo"] = vector_to_json(v.box_lo);
  j["box_hi"] = vector_to_json(v.box_hi);
  return j;
}

inline Json checks_to_json(const std::vector<GeometryCheck>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return a;
}

inline Json brunn_minkowski_to_json(const BrunnMinkowskiCheck& b) {
  return Json{{"lhs", b.lhs}, {"rhs", b.rhs}, {"sigma", b.sigma}, {"passed", b.passed}};
}

inline Json theorem2_report_to_json(const Theorem2GeometryReport& r) {
  Json j;
  j["passed"] = r.passed;
  j["k"] = r.k;
  j["s1"] = indices_to_json(r.s1);
  j["s2"] = indices_to_json(r.s2);
  j["min_pair_distance"] = r.min_pair_distance;
  j["min_center_distance"] = r.min_center_distance;
  j["containment_samples"] = r.containment_samples;
  j["containment_violations"] = r.containment_violations;
  j["vol_v1"] = volume_estimate_to_json(r.vol_v1);
  j["vol_v2"] = volume_estimate_to_json(r.vol_v2);
  j["vol_sum"] = volume_estimate_to_json(r.vol_sum);
  j["brunn_minkowski"] = brunn_minkowski_to_json(r.brunn_minkowski);
  j["packing_lhs"] = r.packing_lhs;
  j["packing_rhs"] = r.packing_rhs;
  j["checks"] = checks_to_json(r.checks);
  return j;
}

inline Json linear_bound_report_to_json(const LinearBoundGeometryReport& r) {
  Json j;
  j["passed"] = r.passed;
  j["triples"] = r.triples;
  Json parts = Json::array();
  for (const auto& t : r.partition) parts.push_back(indices_to_json(t));
  j["partition"] = parts;
  j["leftover"] = indices_to_json(r.leftover);
  j["disjointness_pairs"] = r.disjointness_pairs;
  j["disjointness_failures"] = r.disjointness_failures;
  j["min_center_distance"] = r.min_center_distance;
  j["containment_samples"] = r.containment_samples;
  j["containment_violations"] = r.containment_violations;
  j["containment_radius"] = r.containment_radius;
  j["brunn_minkowski"] = r.brunn_minkowski ? brunn_minkowski_to_json(*r.brunn_minkowski) : Json(nullptr);
  j["bound"] = r.bound;
  j["checks"] = checks_to_json(r.checks);
  return j;
}

inline Json bound_table_to_json(const BoundTable& t) {
  Json j;
  j["n"] = t.n;
  j["bound_A"] = t.bound_A;
  j["bound_Aprime"] = t.bound_Aprime;
  j["bound_linear_A"] = t.bound_linear_A;
  j["linear_cap"] = t.linear_cap;
  j["linear_comparison"] = t.linear_comparison;
  Json rs = Json::array();
  for (const auto& b : t.r_values) rs.push_back(Json{{"p", to_string(b.p)}, {"r", b.r}, {"bound", b.bound}});
  j["r_values"] = rs;
  j["bound_l1"] = t.bound_l1;
  j["bound_l2"] = t.bound_l2;
  j["bound_linf"] = t.bound_linf;
  return j;
}

/// One row per quantity: name,value. Separation bounds appear as bound_r(p).
inline std::string bound_table_csv(const BoundTable& t) {
  std::ostringstream os;
  os.precision(17);
  os << "quantity,value\n";
  os << "n," << t.n << "\n";
  os << "bound_A," << t.bound_A << "\n";
  os << "bound_Aprime," << t.bound_Aprime << "\n";
  os << "bound_linear_A," << t.bound_linear_A << "\n";
  os << "linear_cap," << t.linear_cap << "\n";
  os << "linear_comparison," << (t.linear_comparison ? "true" : "false") << "\n";
  for (const auto& b : t.r_values) {
    os << "r(" << to_string(b.p) << ")," << b.r << "\n";
    os << "bound_r(" << to_string(b.p) << ")," << b.bound << "\n";
  }
  os << "bound_l1," << t.bound_l1 << "\n";
  os << "bound_l2," << t.bound_l2 << "\n";
  os << "bound_linf," << t.bound_linf << "\n";
  return os.str();
}

}  // namespace minex
