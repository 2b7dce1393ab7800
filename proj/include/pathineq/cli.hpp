#pragma once

// Command-line front end: bounds, exact and simulate. run() is the whole
// program so tests can drive it in-process.
//
// Exit codes: 0 ok, 1 input error, 2 computation error.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathineq/bounds.hpp"
#include "pathineq/error.hpp"
#include "pathineq/exact_oracles.hpp"
#include "pathineq/graph_core.hpp"
#include "pathineq/io.hpp"
#include "pathineq/mc_sim.hpp"
#include "pathineq/metric_paths.hpp"
#include "pathineq/symmetry.hpp"
#include "pathineq/transport.hpp"
#include "pathineq/wopt.hpp"

namespace pathineq::cli {

using json = nlohmann::json;

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 1;

/// INEQ_SEED when set to an unsigned integer, else kDefaultSeed.
inline std::uint64_t default_seed() {
  const char* env = std::getenv("INEQ_SEED");
  if (!env || !*env) return kDefaultSeed;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used == std::string_view(env).size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::BadInput, "INEQ_SEED must be an unsigned integer");
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Provenance attached to every report.
class RunManifest {
 public:
  explicit RunManifest(std::string command) : command_(std::move(command)) {}

  void input(const std::string& name, std::string_view bytes) {
    inputs_.push_back({{"name", name}, {"fnv1a64", io::hex64(io::fnv1a(bytes))}});
  }
  void seed(std::uint64_t s) { seed_ = s; }
  void output(std::string name) { outputs_.push_back(std::move(name)); }

  json to_json() const {
    json j{{"command", command_}, {"inputs", inputs_}, {"version", kVersion}, {"timestamp", utc_timestamp()},
           {"outputs", outputs_}};
    j["seed"] = seed_ ? json(*seed_) : json(nullptr);
    return j;
  }

 private:
  std::string command_;
  json inputs_ = json::array();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> outputs_;
};

/// Reads an argument that is inline JSON or a file path, hashing what it read.
inline json load_input(const std::string& arg, const std::string& name, RunManifest& manifest) {
  const bool inline_json = !arg.empty() && (arg.front() == '[' || arg.front() == '{');
  const std::string text = inline_json ? arg : io::read_file(arg);
  manifest.input(name + (inline_json ? "" : ":" + arg), text);
  return io::parse(text, name);
}

struct LoadedGraph {
  std::optional<ReversibleModel> model;
  std::string family;  // gallery family, empty for files
  std::vector<long> params;
};

inline LoadedGraph load_graph(const std::string& arg, RunManifest& manifest) {
  LoadedGraph g;
  if (io::is_gallery_uri(arg)) {
    manifest.input("graph", arg);
    g.model.emplace(io::gallery_from_uri(arg));
    std::string rest = arg.substr(8);
    const auto colon = rest.find(':');
    g.family = rest.substr(0, colon);
    if (colon != std::string::npos) {
      std::string p = rest.substr(colon + 1);
      for (char& c : p)
        if (c == ',') c = ':';
      std::stringstream ss(p);
      std::string item;
      while (std::getline(ss, item, ':')) g.params.push_back(std::stol(item));
    }
    return g;
  }
  g.model.emplace(io::model_from_json(load_input(arg, "graph", manifest)));
  return g;
}

struct MetricChoice {
  Metric rho;
  std::optional<std::vector<double>> phi;
};

inline MetricChoice choose_metric(const std::string& spec, const ReversibleModel& model, const LengthFunction* w,
                                  RunManifest& manifest) {
  if (spec == "graph") return {graph_metric(model), std::nullopt};
  if (spec == "discrete") return {Metric::discrete(model.vertex_count()), std::nullopt};
  if (spec == "wdist") {
    if (!w) throw Error(ErrorKind::BadInput, "--metric wdist needs a fixed length function");
    return {all_pairs_distance(model, *w), std::nullopt};
  }
  if (spec.rfind("phi:", 0) == 0) {
    auto phi = io::vector_from_json(load_input(spec.substr(4), "phi", manifest), model, "phi");
    for (double v : phi)
      if (!(v >= 0.0)) throw Error(ErrorKind::BadInput, "phi must be nonnegative");
    Metric rho = Metric::weighted_discrete(phi);
    return {std::move(rho), std::move(phi)};
  }
  throw Error(ErrorKind::BadInput, "unknown metric '" + spec + "'");
}

inline PathSystem choose_paths(const std::string& spec, const ReversibleModel& model, RunManifest& manifest) {
  if (spec == "geodesic") return PathSystem::uniform_geodesic(model);
  if (spec == "tree") {
    try {
      return PathSystem::tree_unique(model);
    } catch (const Error& e) {
      throw Error(ErrorKind::BadInput, e.message());
    }
  }
  const auto list = io::paths_from_json(load_input(spec, "paths", manifest), model);
  try {
    return PathSystem::explicit_paths(model, list);
  } catch (const Error& e) {
    throw Error(ErrorKind::BadInput, e.message());
  }
}

inline void emit(const json& body, const std::string& out_path, RunManifest& manifest, std::ostream& out) {
  manifest.output(out_path.empty() ? "stdout" : out_path);
  json doc = body;
  doc["manifest"] = manifest.to_json();
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw Error(ErrorKind::BadInput, "cannot write '" + out_path + "'");
  f << text;
}

struct BoundsArgs {
  std::string graph, metric = "graph", w = "uniform", paths = "geodesic", out, trace_csv;
  std::size_t threads = 1, restarts = 8;
  std::optional<std::uint64_t> seed;
  bool no_smoothing = false;
};

inline json cmd_bounds(const BoundsArgs& a, RunManifest& manifest) {
  const LoadedGraph g = load_graph(a.graph, manifest);
  const ReversibleModel& model = *g.model;
  const PathSystem paths = choose_paths(a.paths, model, manifest);
  const std::string paths_name(to_string(paths.mode()));
  // Pairs with several unit geodesics split their mass uniformly among them.
  const std::string tie_break = paths.mode() == PathMode::UniformGeodesic ? "uniform" : "none";

  const bool optimize = a.w == "optimize";
  std::optional<LengthFunction> w;
  std::string w_name = a.w;
  if (a.w == "uniform") w = LengthFunction::uniform(model);
  else if (a.w == "invq") w = LengthFunction::inverse_conductance(model);
  else if (!optimize) {
    const std::string file = a.w.rfind("file:", 0) == 0 ? a.w.substr(5) : a.w;
    w = io::lengths_from_json(load_input(file, "lengths", manifest), model);
    w_name = "file";
  }
  const MetricChoice metric = choose_metric(a.metric, model, w ? &*w : nullptr, manifest);
  const std::string metric_name(to_string(metric.rho.kind()));

  OptimizeConfig config;
  config.restarts = a.restarts;
  config.threads = a.threads;
  config.seed = a.seed.value_or(default_seed());
  config.smoothing = !a.no_smoothing;
  if (optimize) manifest.seed(config.seed);
  if (!a.trace_csv.empty() && !optimize) throw Error(ErrorKind::BadInput, "--trace-csv needs --w optimize");
  std::ostringstream trace;
  trace.precision(17);
  trace << "objective,iteration,value\n";

  BoundReport report;
  json optimized = json::object();
  auto with_w = [&](const std::string& name, double fixed_value, std::string_view tag, const Objective& objective,
                    std::map<std::string, std::string> inputs) {
    inputs["paths"] = paths_name;
    inputs["tie_break"] = tie_break;
    inputs["w"] = w_name;
    if (!optimize) {
      report.add(name, fixed_value, tag, inputs);
      return fixed_value;
    }
    const auto res = optimize_w(model, paths, objective, config);
    inputs["value_at_uniform"] = json(res.value_at_uniform).dump();
    inputs["best_start"] = std::to_string(res.best_start);
    for (std::size_t i = 0; i < res.trace.size(); ++i) trace << name << ',' << i << ',' << res.trace[i] << '\n';
    report.add(name, res.value_best, tag, inputs);
    optimized[name] = {{"value_best", res.value_best},
                       {"value_at_uniform", res.value_at_uniform},
                       {"iterations", res.iterations},
                       {"converged", res.converged},
                       {"w_best", io::lengths_to_json(res.w_best, model)["lengths"]}};
    return res.value_best;
  };
  auto value_or_zero = [&](auto fn) { return w ? fn(*w) : 0.0; };

  report.add("poincare_inverse_conductance", poincare_bound(model, paths), formula::kPoincareInverseConductance,
             {{"paths", paths_name}, {"w", "invq"}});
  with_w("poincare_length", value_or_zero([&](const LengthFunction& lw) { return poincare_bound(model, paths, lw); }),
         formula::kPoincareLength, Objective::poincare(), {});
  with_w("ls_bound", value_or_zero([&](const LengthFunction& lw) { return ls_bound(model, paths, lw); }),
         formula::kLogSobolev, Objective::log_sobolev(), {});
  if (metric.phi)
    with_w("weighted_poincare",
           value_or_zero([&](const LengthFunction& lw) { return weighted_poincare(model, paths, lw, *metric.phi); }),
           formula::kWeightedPoincare, Objective::weighted_poincare(*metric.phi), {});
  const double K =
      with_w("K", value_or_zero([&](const LengthFunction& lw) { return K_constant(model, paths, lw, metric.rho); }),
             formula::kTransportInformation, Objective::transport(metric.rho), {{"metric", metric_name}});
  const double kappa = kappa_constant(model, paths, metric.rho);
  report.add("kappa", kappa, formula::kCheegerKappa,
             {{"metric", metric_name}, {"paths", paths_name}, {"tie_break", tie_break}});
  report.append(concentration_constants(model, metric.rho, K, kappa));

  json extra = json::object();
  if (model.is_laplacian()) {
    report.append(laplacian_corollary_bounds(model));
    if (model.vertex_count() <= kMaxAutomorphismVertices) {
      const EdgeOrbits orbits = edge_orbits(model);
      report.append(symmetry_bounds(model, SymmetryClass::verified(orbits)));
      extra["symmetry"] = {{"edge_transitive", orbits.edge_transitive},
                           {"vertex_transitive", orbits.vertex_transitive},
                           {"distance_transitive", orbits.distance_transitive},
                           {"index", orbits.index},
                           {"automorphisms", orbits.automorphism_count}};
    }
    if (g.family == "johnson" && g.params.size() == 2) {
      const auto n = static_cast<std::size_t>(g.params[0]), k = static_cast<std::size_t>(g.params[1]);
      report.add("kappa_johnson", johnson_kappa_formula(n, k), formula::kJohnsonKappa,
                 {{"n", std::to_string(n)}, {"k", std::to_string(k)}});
    }
  }

  if (!a.trace_csv.empty()) {
    std::ofstream f(a.trace_csv, std::ios::binary);
    if (!f) throw Error(ErrorKind::BadInput, "cannot write '" + a.trace_csv + "'");
    f << trace.str();
    manifest.output(a.trace_csv);
  }

  json body = io::to_json(report);
  if (optimize) body["optimized"] = optimized;
  if (!extra.empty()) body["graph"] = extra;
  return body;
}

struct ExactArgs {
  std::string graph, quantity, metric = "graph", nu, nu1, nu2, h, out;
  std::size_t restarts = 8, iterations = 2000, threads = 1;
  std::optional<std::uint64_t> seed;
};

inline json cmd_exact(const ExactArgs& a, RunManifest& manifest) {
  const LoadedGraph g = load_graph(a.graph, manifest);
  const ReversibleModel& model = *g.model;
  auto need = [&](const std::string& value, const char* flag) {
    if (value.empty()) throw Error(ErrorKind::BadInput, "--quantity " + a.quantity + " needs " + flag);
    return value;
  };
  auto metric = [&] { return choose_metric(a.metric, model, nullptr, manifest).rho; };
  json body{{"quantity", a.quantity}};

  if (a.quantity == "cp") {
    const auto sg = spectral_gap(model);
    body["value"] = sg.cp;
    body["gap"] = sg.gap;
    body["eigenfunction"] = io::vertex_map(model, sg.eigenfunction);
    body["spectrum"] = sg.spectrum;
  } else if (a.quantity == "w1") {
    const Metric rho = metric();
    const auto nu1 = io::probability_from_json(load_input(need(a.nu1, "--nu1"), "nu1", manifest), model, "nu1");
    const auto nu2 = io::probability_from_json(load_input(need(a.nu2, "--nu2"), "nu2", manifest), model, "nu2");
    const auto res = wasserstein1(rho, nu1, nu2);
    body["value"] = res.value;
    body["dual_value"] = res.dual_value;
    body["gap"] = res.gap();
    body["pivots"] = res.pivots;
    body["witness"] = io::vertex_map(model, res.witness);
  } else if (a.quantity == "entropy") {
    const auto nu = io::probability_from_json(load_input(need(a.nu, "--nu"), "nu", manifest), model, "nu");
    const auto info = entropy_info(model, nu);
    body["value"] = info.entropy;
    body["entropy"] = info.entropy;
    body["information"] = info.information;
  } else if (a.quantity == "cheeger") {
    if (model.vertex_count() > kMaxCheegerVertices) throw Error(ErrorKind::BadInput, "cheeger enumeration limited to 20 vertices");
    const auto res = cheeger_lower(model, metric());
    body["value"] = res.value;
    json subset = json::array();
    for (Vertex x = 0; x < model.vertex_count(); ++x)
      if (res.best_subset >> x & 1U) subset.push_back(model.label(x));
    body["best_subset"] = subset;
  } else if (a.quantity == "lslower") {
    const std::uint64_t seed = a.seed.value_or(default_seed());
    manifest.seed(seed);
    const auto res = ls_lower(model, a.restarts, a.iterations, seed);
    body["value"] = res.value;
    body["eigenfunction_ratio"] = res.eigenfunction_ratio;
    body["witness"] = io::vertex_map(model, res.witness);
  } else if (a.quantity == "avar") {
    const auto h = io::vector_from_json(load_input(need(a.h, "--observable"), "h", manifest), model, "h");
    body["value"] = asymptotic_variance(model, h);
  } else {
    throw Error(ErrorKind::BadInput, "unknown quantity '" + a.quantity + "'");
  }
  return body;
}

struct SimulateArgs {
  std::string config, out, format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::size_t threads = 1;
};

/// Config: {"model", "g", "t", "r": [...], "trials", "seed"?, "nu"?, "cG_upper"?, "metric"?}.
/// "model" is a gallery URI, a file path or an inline graph object; "nu" is
/// a vector, a vertex label (point mass) or "mu" (default). Without cG_upper
/// the K bound with w = 1 and uniform geodesics is used.
inline json cmd_simulate(const SimulateArgs& a, RunManifest& manifest, std::string* csv = nullptr) {
  const json cfg = load_input(a.config, "config", manifest);
  if (!cfg.is_object()) throw Error(ErrorKind::BadInput, "config must be a JSON object");
  const json& model_spec = io::detail::field(cfg, "model", "config");
  std::optional<ReversibleModel> holder;
  if (model_spec.is_string()) holder.emplace(*load_graph(model_spec.get<std::string>(), manifest).model);
  else holder.emplace(io::model_from_json(model_spec));
  const ReversibleModel& model = *holder;

  const auto g = io::vector_from_json(io::detail::field(cfg, "g", "config"), model, "g");
  std::optional<ProbabilityVector> nu;
  if (!cfg.contains("nu") || cfg["nu"] == "mu") {
    nu.emplace(ProbabilityVector::normalized({model.mu().begin(), model.mu().end()}));
  } else if (cfg["nu"].is_string()) {
    const auto x = model.index_of(cfg["nu"].get<std::string>());
    if (!x) throw Error(ErrorKind::BadInput, "nu names an unknown vertex");
    nu.emplace(ProbabilityVector::point_mass(model.vertex_count(), *x));
  } else {
    nu.emplace(io::probability_from_json(cfg["nu"], model, "nu"));
  }
  const std::string metric_spec = cfg.value("metric", "graph");
  const Metric rho = choose_metric(metric_spec, model, nullptr, manifest).rho;

  ExperimentConfig ec;
  ec.t = io::detail::number(io::detail::field(cfg, "t", "config"), "t");
  const json& rs = io::detail::field(cfg, "r", "config");
  if (!rs.is_array()) throw Error(ErrorKind::BadInput, "r must be an array");
  for (const auto& r : rs) ec.r_list.push_back(io::detail::number(r, "r"));
  if (a.trials) ec.trials = *a.trials;
  else {
    const json& tr = io::detail::field(cfg, "trials", "config");
    if (!tr.is_number_unsigned() && !(tr.is_number_integer() && tr.get<long long>() >= 0))
      throw Error(ErrorKind::BadInput, "trials must be a nonnegative integer");
    ec.trials = tr.get<std::size_t>();
  }
  if (a.seed) ec.seed = *a.seed;
  else if (cfg.contains("seed")) {
    if (!cfg["seed"].is_number_unsigned()) throw Error(ErrorKind::BadInput, "seed must be an unsigned integer");
    ec.seed = cfg["seed"].get<std::uint64_t>();
  } else ec.seed = default_seed();
  manifest.seed(ec.seed);
  ec.threads = a.threads;
  std::string cg_source = "config";
  if (cfg.contains("cG_upper")) {
    ec.cG_upper = io::detail::number(cfg["cG_upper"], "cG_upper");
  } else {
    ec.cG_upper = K_constant(model, PathSystem::uniform_geodesic(model), LengthFunction::uniform(model), rho);
    cg_source = "K_constant(w=uniform, paths=uniform-geodesic)";
  }

  const auto exp = concentration_experiment(model, *nu, g, rho, ec);
  json reports = json::array();
  for (const auto& r : exp.reports)
    reports.push_back({{"t", r.t},
                       {"r", r.r},
                       {"trials", r.trials},
                       {"exceed", r.exceed},
                       {"tail_frequency", r.tail_frequency},
                       {"standard_error", r.standard_error},
                       {"bound", r.bound},
                       {"density_l2", r.density_l2},
                       {"pass", r.pass}});
  if (csv) {
    std::ostringstream ss;
    ss.precision(17);
    ss << "t,r,trials,exceed,tail_frequency,standard_error,bound,density_l2,pass\n";
    for (const auto& r : exp.reports)
      ss << r.t << ',' << r.r << ',' << r.trials << ',' << r.exceed << ',' << r.tail_frequency << ','
         << r.standard_error << ',' << r.bound << ',' << r.density_l2 << ',' << (r.pass ? "true" : "false") << '\n';
    *csv = ss.str();
  }
  return {{"reports", reports},
          {"mu_g", exp.mu_g},
          {"lipschitz", exp.lipschitz},
          {"cG_upper", exp.cG_upper},
          {"cG_source", cg_source},
          {"metric", std::string(to_string(rho.kind()))},
          {"mean_time_average", exp.mean_time_average},
          {"mean_standard_error", exp.mean_standard_error},
          {"all_pass", std::all_of(exp.reports.begin(), exp.reports.end(), [](const auto& r) { return r.pass; })}};
}

inline int exit_code(const Error& e) { return is_computation_error(e.kind()) ? 2 : 1; }

/// The program. args[0] is the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Path-method bounds for functional inequalities of reversible Markov chains"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "Upper bounds from path systems and length functions");
  bounds->add_option("graph", ba.graph, "graph file, inline JSON or gallery:NAME:PARAMS")->required();
  bounds->add_option("--metric", ba.metric, "graph | discrete | wdist | phi:FILE");
  bounds->add_option("--w", ba.w, "uniform | invq | optimize | FILE");
  bounds->add_option("--paths", ba.paths, "geodesic | tree | FILE");
  bounds->add_option("--out", ba.out, "write the report here instead of stdout");
  bounds->add_option("--threads", ba.threads, "parallel restarts for --w optimize")->check(CLI::PositiveNumber);
  bounds->add_option("--restarts", ba.restarts, "random restarts for --w optimize");
  bounds->add_option("--seed", ba.seed, "seed for --w optimize");
  bounds->add_flag("--no-smoothing", ba.no_smoothing, "optimize the max directly");
  bounds->add_option("--trace-csv", ba.trace_csv, "with --w optimize, write objective,iteration,value rows here");

  ExactArgs ea;
  auto* exact = app.add_subcommand("exact", "Exact desk-scale quantities");
  exact->add_option("graph", ea.graph, "graph file, inline JSON or gallery:NAME:PARAMS")->required();
  exact->add_option("--quantity", ea.quantity, "cp | w1 | entropy | cheeger | lslower | avar")->required();
  exact->add_option("--metric", ea.metric, "graph | discrete | phi:FILE");
  exact->add_option("--nu", ea.nu, "probability vector (entropy)");
  exact->add_option("--nu1", ea.nu1, "first probability vector (w1)");
  exact->add_option("--nu2", ea.nu2, "second probability vector (w1)");
  exact->add_option("--observable", ea.h, "observable h (avar)");
  exact->add_option("--restarts", ea.restarts, "random starts (lslower)");
  exact->add_option("--iterations", ea.iterations, "ascent steps per start (lslower)");
  exact->add_option("--seed", ea.seed, "seed (lslower)");
  exact->add_option("--out", ea.out, "write the report here instead of stdout");
  exact->add_option("--threads", ea.threads, "accepted for uniformity; exact quantities are serial")
      ->check(CLI::PositiveNumber);

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the Gaussian tail bound");
  simulate->add_option("config", sa.config, "experiment config file or inline JSON")->required();
  simulate->add_option("--seed", sa.seed, "master seed");
  simulate->add_option("--trials", sa.trials, "override the configured trial count");
  simulate->add_option("--threads", sa.threads, "parallel trial workers")->check(CLI::PositiveNumber);
  simulate->add_option("--out", sa.out, "write the report here instead of stdout");
  simulate->add_option("--format", sa.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::string command;
  for (std::size_t i = 1; i < args.size(); ++i) command += (i > 1 ? " " : "") + args[i];
  RunManifest manifest(command);
  try {
    if (bounds->parsed()) {
      emit(cmd_bounds(ba, manifest), ba.out, manifest, out);
    } else if (exact->parsed()) {
      emit(cmd_exact(ea, manifest), ea.out, manifest, out);
    } else {
      if (sa.format == "csv") {
        std::string csv;
        cmd_simulate(sa, manifest, &csv);
        if (sa.out.empty()) out << csv;
        else {
          std::ofstream f(sa.out, std::ios::binary);
          if (!f) throw Error(ErrorKind::BadInput, "cannot write '" + sa.out + "'");
          f << csv;
        }
      } else {
        emit(cmd_simulate(sa, manifest), sa.out, manifest, out);
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    err << "error: BadInput: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace pathineq::cli
