#pragma once

// Continuous-time jump-chain simulation and Monte Carlo checks of the
// Gaussian tail bound for time averages.
//
// Randomness: trial i of master seed s draws from mt19937_64 seeded with
// stream_seed(s, i). Each step consumes two 53-bit uniforms: U1 for the
// holding time -log(1 - U1) / R(x) and U2 for the target, the first y in
// out-edge order with cumulative rate > U2 R(x). A start drawn from nu
// consumes one uniform first.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pathineq/bounds.hpp"
#include "pathineq/error.hpp"
#include "pathineq/exact_oracles.hpp"
#include "pathineq/graph_core.hpp"
#include "pathineq/metric_paths.hpp"
#include "pathineq/rng.hpp"
#include "pathineq/transport.hpp"

namespace pathineq {

struct Jump {
  double time = 0.0;
  Vertex to = 0;
};

/// Jump times are strictly increasing in (0, horizon]; consecutive states are adjacent.
struct Trajectory {
  Vertex initial = 0;
  std::vector<Jump> jumps;
  double horizon = 0.0;

  Vertex state_at(double t) const {
    Vertex x = initial;
    for (const auto& j : jumps) {
      if (j.time > t) break;
      x = j.to;
    }
    return x;
  }
};

namespace detail {

inline Vertex draw_vertex(std::span<const double> p, double u) {
  double acc = 0.0;
  for (Vertex x = 0; x < p.size(); ++x) {
    acc += p[x];
    if (u < acc) return x;
  }
  // Rounding left u above the cumulative sum: take the last vertex with mass.
  for (std::size_t x = p.size(); x-- > 0;)
    if (p[x] > 0.0) return x;
  return 0;
}

inline Trajectory run_chain(const ReversibleModel& model, Vertex x0, double horizon, std::mt19937_64& rng) {
  Trajectory tr;
  tr.initial = x0;
  tr.horizon = horizon;
  Vertex x = x0;
  double now = 0.0;
  for (;;) {
    const auto edges = model.out_edges(x);
    double total = 0.0;
    for (EdgeId e : edges) total += model.rate(e);
    const double hold = -std::log1p(-unit_uniform(rng)) / total;
    const double target = unit_uniform(rng) * total;
    now += hold;
    if (now > horizon) break;
    double acc = 0.0;
    Vertex next = model.to(edges.back());
    for (EdgeId e : edges) {
      acc += model.rate(e);
      if (target < acc) {
        next = model.to(e);
        break;
      }
    }
    tr.jumps.push_back({now, next});
    x = next;
  }
  return tr;
}

}  // namespace detail

inline Trajectory simulate(const ReversibleModel& model, Vertex x0, double horizon, std::uint64_t seed) {
  if (x0 >= model.vertex_count()) throw Error(ErrorKind::BadParams, "start vertex out of range");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw Error(ErrorKind::BadParams, "horizon must be finite and >= 0");
  std::mt19937_64 rng(stream_seed(seed, 0));
  return detail::run_chain(model, x0, horizon, rng);
}

inline Trajectory simulate(const ReversibleModel& model, const ProbabilityVector& nu, double horizon, std::uint64_t seed) {
  if (nu.size() != model.vertex_count()) throw Error(ErrorKind::BadInput, "start distribution has the wrong length");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw Error(ErrorKind::BadParams, "horizon must be finite and >= 0");
  std::mt19937_64 rng(stream_seed(seed, 0));
  const Vertex x0 = detail::draw_vertex(nu.values(), unit_uniform(rng));
  return detail::run_chain(model, x0, horizon, rng);
}

/// Exact integral of g(X_s) over [0, horizon]: a sum over holding intervals.
inline double time_integral(const Trajectory& tr, std::span<const double> g) {
  double s = 0.0, last = 0.0;
  Vertex x = tr.initial;
  for (const auto& j : tr.jumps) {
    s += g[x] * (j.time - last);
    last = j.time;
    x = j.to;
  }
  return s + g[x] * (tr.horizon - last);
}

/// Fraction of [0, horizon] spent at each vertex.
inline std::vector<double> occupation(const Trajectory& tr, std::size_t n) {
  std::vector<double> occ(n, 0.0);
  double last = 0.0;
  Vertex x = tr.initial;
  for (const auto& j : tr.jumps) {
    occ[x] += j.time - last;
    last = j.time;
    x = j.to;
  }
  occ[x] += tr.horizon - last;
  if (tr.horizon > 0.0)
    for (double& v : occ) v /= tr.horizon;
  return occ;
}

struct ConcentrationReport {
  double t = 0.0;
  double r = 0.0;
  std::size_t trials = 0;
  std::size_t exceed = 0;
  double tail_frequency = 0.0;  // in [0, 1]
  double standard_error = 0.0;
  double bound = 0.0;
  double density_l2 = 0.0;
  bool pass = false;
};

struct ConcentrationExperiment {
  std::vector<ConcentrationReport> reports;  // one per r, in input order
  double mu_g = 0.0;
  double lipschitz = 0.0;
  double cG_upper = 0.0;
  double mean_time_average = 0.0;
  double mean_standard_error = 0.0;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  double t = 0.0;
  std::vector<double> r_list;
  std::size_t trials = 1000;
  double cG_upper = 0.0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

inline constexpr std::size_t kMinTrials = 1000;

/// Estimates P_nu((1/t) int_0^t g(X_s) ds > mu(g) + r) and compares it with
/// ||d nu/d mu||_2 exp(-t r^2 / (2 cG ||g||_Lip^2)); pass allows three
/// binomial standard errors of slack.
inline ConcentrationExperiment concentration_experiment(const ReversibleModel& model, const ProbabilityVector& nu,
                                                        std::span<const double> g, const Metric& rho,
                                                        const ExperimentConfig& config) {
  const std::size_t n = model.vertex_count();
  if (nu.size() != n || g.size() != n || rho.size() != n)
    throw Error(ErrorKind::BadInput, "nu, g and the metric must all have one entry per vertex");
  if (config.trials < kMinTrials)
    throw Error(ErrorKind::BadParams, "at least " + std::to_string(kMinTrials) + " trials are required");
  if (!(config.t > 0.0) || !std::isfinite(config.t)) throw Error(ErrorKind::BadParams, "t must be positive");
  if (!(config.cG_upper > 0.0) || !std::isfinite(config.cG_upper))
    throw Error(ErrorKind::BadParams, "cG_upper must be positive");
  for (double r : config.r_list)
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::BadParams, "every r must be positive");
  for (double v : g)
    if (!std::isfinite(v)) throw Error(ErrorKind::BadInput, "g must be finite");

  ConcentrationExperiment out;
  out.seed = config.seed;
  out.cG_upper = config.cG_upper;
  out.mu_g = model.mean(g);
  out.lipschitz = lipschitz_seminorm(rho, g);
  const double l2 = density_l2_norm(model, nu);

  std::vector<double> averages(config.trials);
  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      std::mt19937_64 rng(stream_seed(config.seed, i));
      const Vertex x0 = detail::draw_vertex(nu.values(), unit_uniform(rng));
      averages[i] = time_integral(detail::run_chain(model, x0, config.t, rng), g) / config.t;
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, config.trials);
  if (workers == 1) {
    run_range(0, config.trials);
  } else {
    std::vector<std::future<void>> tasks;
    const std::size_t chunk = (config.trials + workers - 1) / workers;
    for (std::size_t lo = 0; lo < config.trials; lo += chunk)
      tasks.push_back(std::async(std::launch::async, run_range, lo, std::min(config.trials, lo + chunk)));
    for (auto& task : tasks) task.get();
  }

  const double N = static_cast<double>(config.trials);
  double sum = 0.0, sum_sq = 0.0;
  for (double a : averages) {
    sum += a;
    sum_sq += a * a;
  }
  out.mean_time_average = sum / N;
  const double var = std::max(0.0, (sum_sq - sum * sum / N) / (N - 1.0));
  out.mean_standard_error = std::sqrt(var / N);

  for (double r : config.r_list) {
    ConcentrationReport rep;
    rep.t = config.t;
    rep.r = r;
    rep.trials = config.trials;
    rep.density_l2 = l2;
    for (double a : averages) rep.exceed += a > out.mu_g + r;
    rep.tail_frequency = static_cast<double>(rep.exceed) / N;
    rep.standard_error = std::sqrt(rep.tail_frequency * (1.0 - rep.tail_frequency) / N);
    if (out.lipschitz > 0.0)
      rep.bound = l2 * std::exp(-config.t * r * r / (2.0 * config.cG_upper * out.lipschitz * out.lipschitz));
    // Constant g never exceeds its mean; exp(-inf) gives bound 0.
    rep.pass = rep.tail_frequency <= rep.bound + 3.0 * rep.standard_error;
    out.reports.push_back(rep);
  }
  return out;
}

}  // namespace pathineq
