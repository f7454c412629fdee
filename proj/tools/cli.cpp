#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <gmp.h>

#include "minex/auerbach.hpp"
#include "minex/certificates.hpp"
#include "minex/conditions.hpp"
#include "minex/constructions.hpp"
#include "minex/io.hpp"
#include "minex/search.hpp"
#include "minex/volume.hpp"

namespace minex::cli {
namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  unsigned threads = 0;
  std::string out_path;
  std::string mode;  // empty: take it from the input
  double tol = 1e-9;

  // construct
  std::string family;
  std::size_t n = 0;
  // check
  std::string conditions = "A,A',B,B'";
  std::string set_path, norm_path;
  // search / pipeline
  std::string condition = "A";
  std::optional<std::size_t> dim;
  std::size_t resolution = 720;
  double budget = 1e7;
  std::optional<std::uint64_t> rotation_seed;
  // randomized commands
  std::optional<std::uint64_t> seed;
  std::size_t samples = 10000;
  // auerbach
  std::size_t restarts = 16;
  std::size_t verify_samples = 10000;
  std::size_t max_sweeps = 1000;
  // volume
  std::string verify;
  std::size_t volume_samples = 100000;
  std::optional<std::uint64_t> shuffle_seed;
  // bounds
  std::string p_list;
  std::string format = "json";
};

class Run {
 public:
  Run(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt), start_(clock::now()) {
    threads_ = resolve_threads(opt.threads);
    config_["threads"] = threads_;
  }

  const Options& opt() const { return opt_; }
  const std::string& command() const { return command_; }
  unsigned threads() const { return threads_; }
  Json& config() { return config_; }
  Json& seeds() { return seeds_; }

  Json load(const std::string& path, const std::string& role) {
    const std::string text = read_file(path);
    hashes_[role] = fnv1a64_hex(text);
    return parse_json(text, path);
  }

  std::uint64_t require_seed(const char* why) const {
    if (!opt_.seed) throw InputError(command_ + ": --seed is required (" + why + ")");
    return *opt_.seed;
  }

  Json manifest() const {
    Json m;
    m["command"] = command_;
    m["config"] = config_;
    m["seeds"] = seeds_;
    m["versions"] = Json{{"minex", kVersion},
                         {"schema_version", kSchemaVersion},
                         {"gmp", gmp_version},
                         {"nlohmann_json", "3.11.3"},
                         {"cli11", CLI11_VERSION},
                         {"compiler", __VERSION__}};
    m["wall_time_seconds"] = std::chrono::duration<double>(clock::now() - start_).count();
    m["input_hashes"] = hashes_;
    return m;
  }

  /// Header fields, then the payload, then the manifest.
  Json finish(bool passed, const Json& payload) const {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = command_;
    doc["status"] = passed ? "pass" : "fail";
    for (const auto& [k, v] : payload.items()) doc[k] = v;
    doc["manifest"] = manifest();
    return doc;
  }

 private:
  using clock = std::chrono::steady_clock;
  std::string command_;
  Options opt_;
  clock::time_point start_;
  unsigned threads_ = 1;
  Json config_ = Json::object(), seeds_ = Json::object(), hashes_ = Json::object();
};

struct Emitted {
  int code = kExitPass;
  std::string text;
};

Emitted emit_json(const Json& doc, bool passed) { return Emitted{passed ? kExitPass : kExitFail, doc.dump(2) + "\n"}; }

ScalarMode resolve_mode(const Options& opt, const std::optional<Json>& set_doc) {
  if (!opt.mode.empty()) return parse_mode(opt.mode);
  if (set_doc) return set_document_mode(*set_doc);
  return ScalarMode::exact;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ','))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

template <Scalar T>
std::optional<NormSpec<T>> optional_norm(Run& run) {
  if (run.opt().norm_path.empty()) return std::nullopt;
  return norm_from_document<T>(run.load(run.opt().norm_path, "norm"));
}

template <Scalar T>
NormSpec<T> required_norm(Run& run) {
  if (run.opt().norm_path.empty()) throw InputError(run.command() + ": --norm is required");
  return *optional_norm<T>(run);
}

// ---- construct

Emitted do_construct(Run& run) {
  const Options& o = run.opt();
  run.config()["family"] = o.family;
  run.config()["n"] = o.n;
  const ScalarMode mode = resolve_mode(o, std::nullopt);
  run.config()["mode"] = mode_name(mode);
  if (o.n == 0) throw InputError("construct: --n must be positive");
  const VectorSet<Rational> s = o.family == "theorem1" ? theorem1_set(o.n) : linf_canonical(o.n);
  Json payload;
  payload["family"] = o.family;
  payload["n"] = o.n;
  payload["set"] = mode == ScalarMode::exact ? set_to_json(s) : set_to_json(to_double(s));
  return emit_json(run.finish(true, payload), true);
}

// ---- check

template <Scalar T>
Emitted do_check_typed(Run& run, const Json& set_doc) {
  const Options& o = run.opt();
  const auto s = set_from_document<T>(set_doc, optional_norm<T>(run));
  std::vector<Condition> conds;
  for (const auto& c : split_list(o.conditions)) conds.push_back(parse_condition(c));
  if (conds.empty()) throw InputError("check: --conditions is empty");
  CheckOptions copt;
  copt.tolerance = o.tol;
  copt.threads = run.threads();
  Json results = Json::array();
  bool all = true;
  for (Condition c : conds) {
    const auto rep = check_condition(c, s, copt);
    all = all && rep.passed;
    results.push_back(condition_report_to_json(rep));
  }
  Json payload;
  payload["passed"] = all;
  payload["results"] = results;
  payload["set"] = set_to_json(s);
  return emit_json(run.finish(all, payload), all);
}

Emitted do_check(Run& run) {
  const Options& o = run.opt();
  if (o.set_path.empty()) throw InputError("check: --set is required");
  const Json doc = run.load(o.set_path, "set");
  const ScalarMode mode = resolve_mode(o, doc);
  run.config()["conditions"] = o.conditions;
  run.config()["mode"] = mode_name(mode);
  run.config()["tol"] = o.tol;
  return mode == ScalarMode::exact ? do_check_typed<Rational>(run, doc) : do_check_typed<double>(run, doc);
}

// ---- search

CandidatePool build_pool(Run& run, ScalarMode mode) {
  const Options& o = run.opt();
  PoolOptions popt;
  popt.rotation_seed = o.rotation_seed;
  popt.tolerance = o.tol;
  if (o.rotation_seed) run.seeds()["rotation_seed"] = *o.rotation_seed;
  run.config()["resolution"] = o.resolution;
  run.config()["mode"] = mode_name(mode);
  if (mode == ScalarMode::exact) {
    const auto norm = required_norm<Rational>(run);
    if (o.dim && *o.dim != norm.dim()) throw InputError("--dim differs from the norm dimension");
    return discretize_sphere(norm, o.resolution, popt);
  }
  const auto norm = required_norm<double>(run);
  if (o.dim && *o.dim != norm.dim()) throw InputError("--dim differs from the norm dimension");
  return discretize_sphere(norm, o.resolution, popt);
}

std::uint64_t budget_of(const Options& o) {
  if (!(o.budget >= 1.0) || o.budget > 1e18) throw InputError("--budget must be in [1, 1e18]");
  return static_cast<std::uint64_t>(o.budget);
}

Json result_set_json(const CandidatePool& pool, const SearchResult& r) {
  if (auto ex = exact_result_set(pool, r)) return set_to_json(*ex);
  std::vector<Vector<double>> vs;
  for (auto i : r.best_set) vs.push_back(pool.candidates[i]);
  return set_to_json(VectorSet<double>(std::move(vs), pool.norm, pool.tolerance));
}

Emitted do_search(Run& run) {
  const Options& o = run.opt();
  const Condition c = parse_condition(o.condition);
  if (c != Condition::A && c != Condition::A_prime) throw InputError("search: --condition must be A or A'");
  const ScalarMode mode = resolve_mode(o, std::nullopt);
  run.config()["condition"] = condition_name(c);
  run.config()["budget"] = budget_of(o);
  const CandidatePool pool = build_pool(run, mode);
  const SearchResult r = c == Condition::A ? search_strong(pool, budget_of(o)) : search_weak(pool, budget_of(o));
  Json payload;
  payload["pool"] = pool_to_json(pool);
  payload["result"] = search_result_to_json(r);
  payload["set"] = result_set_json(pool, r);
  return emit_json(run.finish(true, payload), true);
}

// ---- certify

template <Scalar T>
bool needs_sampling(const NormSpec<T>& norm) {
  return !is_exact_v<T> || !norm.polytope_class();
}

template <Scalar T>
Json remarks_json(const VectorSet<T>& s, double tol) {
  Json r = Json::object();
  if (s.norm().is_l1()) r["l1_sign_patterns"] = sign_pattern_to_json(l1_sign_pattern_check(s));
  if (s.norm().kind() == NormKind::linf) r["linf_pigeonhole"] = pigeonhole_to_json(linf_pigeonhole_check(s, tol));
  return r;
}

template <Scalar T>
IsometryCertificate<T> certify_set(Run& run, const VectorSet<T>& s) {
  const Options& o = run.opt();
  IsometryOptions iopt;
  iopt.samples = o.samples;
  iopt.tolerance = o.tol;
  if (needs_sampling(s.norm())) {
    iopt.seed = run.require_seed("this input is verified at sampled points");
    run.seeds()["seed"] = iopt.seed;
    run.config()["samples"] = o.samples;
  }
  return detect_linf_isometry(s, iopt);
}

template <Scalar T>
Emitted do_certify_typed(Run& run, const Json& set_doc) {
  const auto s = set_from_document<T>(set_doc, optional_norm<T>(run));
  const auto cert = certify_set(run, s);
  const bool ok = cert.verdict != IsometryVerdict::refuted;
  Json payload;
  payload["passed"] = ok;
  payload["certificate"] = certificate_to_json(cert);
  payload["remarks"] = remarks_json(s, run.opt().tol);
  payload["set"] = set_to_json(s);
  return emit_json(run.finish(ok, payload), ok);
}

Emitted do_certify(Run& run) {
  const Options& o = run.opt();
  if (o.set_path.empty()) throw InputError("certify: --set is required");
  const Json doc = run.load(o.set_path, "set");
  const ScalarMode mode = resolve_mode(o, doc);
  run.config()["mode"] = mode_name(mode);
  run.config()["tol"] = o.tol;
  return mode == ScalarMode::exact ? do_certify_typed<Rational>(run, doc) : do_certify_typed<double>(run, doc);
}

// ---- auerbach

template <Scalar T>
Emitted do_auerbach_typed(Run& run) {
  const Options& o = run.opt();
  const auto norm = required_norm<T>(run);
  const std::uint64_t seed = run.require_seed("restarts and verification are randomized");
  const std::uint64_t verify_seed = substream_seed(seed, 1);
  run.seeds()["seed"] = seed;
  run.seeds()["verify_seed"] = verify_seed;
  AuerbachOptions aopt;
  aopt.max_sweeps = o.max_sweeps;
  aopt.threads = run.threads();
  const auto frame = compute_auerbach(norm, o.restarts, seed, aopt);
  const auto rep = verify_auerbach(frame, norm, o.verify_samples, verify_seed, o.tol);
  Json payload;
  payload["passed"] = rep.passed;
  payload["norm"] = norm_to_json(norm);
  payload["frame"] = auerbach_frame_to_json(frame);
  payload["verification"] = auerbach_report_to_json(rep);
  return emit_json(run.finish(rep.passed, payload), rep.passed);
}

Emitted do_auerbach(Run& run) {
  const Options& o = run.opt();
  const ScalarMode mode = resolve_mode(o, std::nullopt);
  run.config()["mode"] = mode_name(mode);
  run.config()["restarts"] = o.restarts;
  run.config()["verify_samples"] = o.verify_samples;
  run.config()["max_sweeps"] = o.max_sweeps;
  run.config()["tol"] = o.tol;
  return mode == ScalarMode::exact ? do_auerbach_typed<Rational>(run) : do_auerbach_typed<double>(run);
}

// ---- volume

template <Scalar T>
Emitted do_volume_typed(Run& run, const Json& set_doc) {
  const Options& o = run.opt();
  const auto s = set_from_document<T>(set_doc, optional_norm<T>(run));
  const std::uint64_t seed = run.require_seed("volumes are Monte Carlo estimates");
  run.seeds()["seed"] = seed;
  GeometryOptions gopt;
  gopt.tolerance = o.tol;
  gopt.threads = run.threads();
  gopt.shuffle_seed = o.shuffle_seed;
  if (o.shuffle_seed) run.seeds()["shuffle_seed"] = *o.shuffle_seed;

  CheckOptions copt;
  copt.tolerance = o.tol;
  copt.threads = run.threads();
  const bool theorem2 = o.verify == "theorem2";
  if (!theorem2 && s.size() < 3) throw InputError("volume: linear-bound needs |S| >= 3");
  if (s.dim() != 2 && s.dim() != 3) throw InputError("volume: only n = 2 and n = 3 are supported");
  const auto pre = theorem2 ? check_weak_collapsing(s, copt) : check_strong_collapsing(s, copt);
  Json payload;
  payload["verify"] = o.verify;
  if (!pre.passed) {
    payload["passed"] = false;
    payload["precondition"] = condition_report_to_json(pre);
    payload["set"] = set_to_json(s);
    return emit_json(run.finish(false, payload), false);
  }
  bool ok;
  if (theorem2) {
    const auto rep = verify_theorem2_geometry(s, o.volume_samples, seed, gopt);
    ok = rep.passed;
    payload["report"] = theorem2_report_to_json(rep);
  } else {
    const auto rep = verify_linear_bound_geometry(s, o.volume_samples, seed, gopt);
    ok = rep.passed;
    payload["report"] = linear_bound_report_to_json(rep);
  }
  payload["passed"] = ok;
  payload["set"] = set_to_json(s);
  return emit_json(run.finish(ok, payload), ok);
}

Emitted do_volume(Run& run) {
  const Options& o = run.opt();
  if (o.set_path.empty()) throw InputError("volume: --set is required");
  const Json doc = run.load(o.set_path, "set");
  const ScalarMode mode = resolve_mode(o, doc);
  run.config()["verify"] = o.verify;
  run.config()["mode"] = mode_name(mode);
  run.config()["samples"] = o.volume_samples;
  run.config()["tol"] = o.tol;
  return mode == ScalarMode::exact ? do_volume_typed<Rational>(run, doc) : do_volume_typed<double>(run, doc);
}

// ---- bounds

Emitted do_bounds(Run& run) {
  const Options& o = run.opt();
  std::vector<Rational> ps;
  for (const auto& p : split_list(o.p_list)) {
    try {
      ps.push_back(parse_rational(p));
    } catch (const Error& e) {
      throw InputError(std::string("--p: ") + e.what());
    }
  }
  run.config()["n"] = o.n;
  run.config()["p"] = split_list(o.p_list);
  run.config()["format"] = o.format;
  const BoundTable t = bound_table(o.n, ps);
  if (o.format == "csv") return Emitted{kExitPass, bound_table_csv(t)};
  Json payload;
  payload["bounds"] = bound_table_to_json(t);
  return emit_json(run.finish(true, payload), true);
}

// ---- pipeline

Emitted do_pipeline(Run& run) {
  const Options& o = run.opt();
  const ScalarMode mode = resolve_mode(o, std::nullopt);
  run.config()["budget"] = budget_of(o);
  run.config()["tol"] = o.tol;
  const CandidatePool pool = build_pool(run, mode);
  const SearchResult r = search_strong(pool, budget_of(o));
  const std::size_t n = pool.dim();
  Json payload;
  payload["pool"] = pool_to_json(pool);
  payload["result"] = search_result_to_json(r);
  payload["set"] = result_set_json(pool, r);
  bool ok = true;
  if (r.size == 2 * n) {
    if (auto ex = exact_result_set(pool, r)) {
      const auto cert = certify_set(run, *ex);
      ok = cert.verdict != IsometryVerdict::refuted;
      payload["certificate"] = certificate_to_json(cert);
    } else {
      std::vector<Vector<double>> vs;
      for (auto i : r.best_set) vs.push_back(pool.candidates[i]);
      const VectorSet<double> s(std::move(vs), pool.norm, pool.tolerance);
      const auto cert = certify_set(run, s);
      ok = cert.verdict != IsometryVerdict::refuted;
      payload["certificate"] = certificate_to_json(cert);
    }
  } else {
    payload["certificate"] = nullptr;
    payload["certificate_skipped"] = "search found " + std::to_string(r.size) + " < 2n = " + std::to_string(2 * n);
  }
  payload["passed"] = ok;
  return emit_json(run.finish(ok, payload), ok);
}

// ---- argument parsing

void add_common(CLI::App* sub, Options& o, bool mode = true) {
  sub->add_option("--out", o.out_path, "Also write the report to this file");
  if (mode) sub->add_option("--mode", o.mode, "Scalar mode")->check(CLI::IsMember({"exact", "float"}));
}

void add_tol(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "Floating tolerance")->check(CLI::NonNegativeNumber);
}

void add_pool(CLI::App* sub, Options& o) {
  sub->add_option("--norm", o.norm_path, "Norm document")->required();
  sub->add_option("--dim", o.dim, "Expected dimension (checked against the norm)");
  sub->add_option("--resolution", o.resolution, "Grid points on the sphere")->check(CLI::PositiveNumber);
  sub->add_option("--budget", o.budget, "Branch-and-bound node budget");
  sub->add_option("--rotation-seed", o.rotation_seed, "Random phase or rotation of the grid");
}

int dispatch(CLI::App& app, const Options& o, std::ostream& out, std::ostream& err) {
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Run run(name, o);
  Emitted e;
  try {
    if (name == "construct") e = do_construct(run);
    else if (name == "check") e = do_check(run);
    else if (name == "search") e = do_search(run);
    else if (name == "certify") e = do_certify(run);
    else if (name == "auerbach") e = do_auerbach(run);
    else if (name == "volume") e = do_volume(run);
    else if (name == "bounds") e = do_bounds(run);
    else e = do_pipeline(run);
  } catch (const std::exception& ex) {
    err << "minex " << name << ": " << ex.what() << "\n";
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = name;
    doc["status"] = "error";
    doc["error"] = ex.what();
    out << doc.dump(2) << "\n";
    return kExitUsage;
  }
  out << e.text;
  if (!o.out_path.empty()) {
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f || !(f << e.text)) {
      err << "minex " << name << ": cannot write '" << o.out_path << "'\n";
      return kExitUsage;
    }
  }
  return e.code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Extremal unit-vector configurations in finite-dimensional normed spaces", "minex"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", o.threads, "Worker cap (falls back to MINEX_THREADS, then 1)");

  auto* construct = app.add_subcommand("construct", "Build a known configuration");
  construct->add_option("--family", o.family, "Construction")->required()->check(
      CLI::IsMember({"theorem1", "linf-canonical"}));
  construct->add_option("--n", o.n, "Dimension")->required();
  add_common(construct, o);

  auto* check = app.add_subcommand("check", "Check collapsing and balancing conditions");
  check->add_option("--conditions", o.conditions, "Comma-separated subset of A,A',B,B'");
  check->add_option("--set", o.set_path, "Set document")->required();
  check->add_option("--norm", o.norm_path, "Norm document (overrides the set's norm)");
  add_common(check, o);
  add_tol(check, o);

  auto* search = app.add_subcommand("search", "Largest (A) or (A') subset of a sphere discretization");
  search->add_option("--condition", o.condition, "A or A'");
  add_pool(search, o);
  add_common(search, o);
  add_tol(search, o);

  auto* certify = app.add_subcommand("certify", "Equality-case isometry certificate for |S| = 2n");
  certify->add_option("--set", o.set_path, "Set document")->required();
  certify->add_option("--norm", o.norm_path, "Norm document (overrides the set's norm)");
  certify->add_option("--seed", o.seed, "Seed for sampled verification");
  certify->add_option("--samples", o.samples, "Sample count for sampled verification")->check(CLI::PositiveNumber);
  add_common(certify, o);
  add_tol(certify, o);

  auto* auerbach = app.add_subcommand("auerbach", "Auerbach basis by determinant ascent");
  auerbach->add_option("--norm", o.norm_path, "Norm document")->required();
  auerbach->add_option("--restarts", o.restarts, "Number of restarts")->check(CLI::PositiveNumber);
  auerbach->add_option("--seed", o.seed, "Seed (required)");
  auerbach->add_option("--verify-samples", o.verify_samples, "Verification samples")->check(CLI::PositiveNumber);
  auerbach->add_option("--max-sweeps", o.max_sweeps, "Sweep cap per restart")->check(CLI::PositiveNumber);
  add_common(auerbach, o);
  add_tol(auerbach, o);

  auto* volume = app.add_subcommand("volume", "Sampled ball-packing arguments");
  volume->add_option("--verify", o.verify, "Argument")->required()->check(CLI::IsMember({"theorem2", "linear-bound"}));
  volume->add_option("--set", o.set_path, "Set document")->required();
  volume->add_option("--norm", o.norm_path, "Norm document (overrides the set's norm)");
  volume->add_option("--samples", o.volume_samples, "Samples per estimate")->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}));
  volume->add_option("--seed", o.seed, "Seed (required)");
  volume->add_option("--shuffle-seed", o.shuffle_seed, "Permute S before partitioning");
  add_common(volume, o);
  add_tol(volume, o);

  auto* bounds = app.add_subcommand("bounds", "Closed-form cardinality bounds");
  bounds->add_option("--n", o.n, "Dimension")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--p", o.p_list, "Comma-separated exponents p > 1 for the separation bounds");
  bounds->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  add_common(bounds, o, false);

  auto* pipeline = app.add_subcommand("pipeline", "Strong search, then the isometry certificate at |S| = 2n");
  add_pool(pipeline, o);
  pipeline->add_option("--seed", o.seed, "Seed for sampled certification");
  pipeline->add_option("--samples", o.samples, "Sample count for sampled certification")->check(CLI::PositiveNumber);
  add_common(pipeline, o);
  add_tol(pipeline, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitPass : kExitUsage;
  }
  return dispatch(app, o, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"minex"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace minex::cli
