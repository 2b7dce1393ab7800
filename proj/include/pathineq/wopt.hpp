#pragma once

// Search over length functions w for small values of the path bounds.
//
// Every objective is invariant under w -> c w, so the search runs in log w
// and renormalizes to sum w = |E0| after each sweep. The result is an upper
// estimate of the infimum over w; no global optimality is claimed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "pathineq/bounds.hpp"
#include "pathineq/error.hpp"
#include "pathineq/functionals.hpp"
#include "pathineq/graph_core.hpp"
#include "pathineq/metric_paths.hpp"
#include "pathineq/rng.hpp"

namespace pathineq {

enum class ObjectiveKind { LogSobolev, TransportK, PoincareLength, WeightedPoincare };

constexpr std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::LogSobolev: return "ls_bound";
    case ObjectiveKind::TransportK: return "K_constant";
    case ObjectiveKind::PoincareLength: return "poincare_bound";
    case ObjectiveKind::WeightedPoincare: return "weighted_poincare";
  }
  return "unknown";
}

struct Objective {
  ObjectiveKind kind = ObjectiveKind::PoincareLength;
  Metric rho;               // TransportK
  std::vector<double> phi;  // WeightedPoincare

  static Objective log_sobolev() { return {ObjectiveKind::LogSobolev, {}, {}}; }
  static Objective poincare() { return {ObjectiveKind::PoincareLength, {}, {}}; }
  static Objective transport(Metric rho) { return {ObjectiveKind::TransportK, std::move(rho), {}}; }
  static Objective weighted_poincare(std::vector<double> phi) {
    return {ObjectiveKind::WeightedPoincare, {}, std::move(phi)};
  }
};

inline void validate(const ReversibleModel& model, const Objective& objective) {
  const std::size_t n = model.vertex_count();
  if (objective.kind == ObjectiveKind::TransportK && objective.rho.size() != n)
    throw Error(ErrorKind::BadObjective, "K objective needs a metric on the model's vertices");
  if (objective.kind == ObjectiveKind::WeightedPoincare) {
    if (objective.phi.size() != n) throw Error(ErrorKind::BadObjective, "weighted objective needs phi per vertex");
    for (double v : objective.phi)
      if (!(v >= 0.0)) throw Error(ErrorKind::BadObjective, "phi must be nonnegative");
  }
}

/// Evaluates the objective through the bounds module.
inline double evaluate(const ReversibleModel& model, const PathSystem& paths, const Objective& objective,
                       const LengthFunction& w) {
  switch (objective.kind) {
    case ObjectiveKind::LogSobolev: return ls_bound(model, paths, w);
    case ObjectiveKind::TransportK: return K_constant(model, paths, w, objective.rho);
    case ObjectiveKind::PoincareLength: return poincare_bound(model, paths, w);
    case ObjectiveKind::WeightedPoincare: return weighted_poincare(model, paths, w, objective.phi);
  }
  throw Error(ErrorKind::BadObjective, "unknown objective");
}

/// The objective's per-edge terms as explicit functions of w, built once from
/// the joint traversal probabilities so each evaluation is a small dense
/// product instead of a pass over all pairs.
class CompiledObjective {
 public:
  CompiledObjective(const ReversibleModel& model, const PathSystem& paths, const Objective& objective)
      : model_(model), kind_(objective.kind), n_(model.vertex_count()), m_(model.undirected_count()) {
    validate(model, objective);
    const std::size_t edges = model.edge_count();
    if (kind_ == ObjectiveKind::LogSobolev) {
      coef_.assign(edges * n_ * m_, 0.0);
      for_each_joint_traversal(model, paths, [&](EdgeId e, std::size_t k, Vertex x, Vertex y, double p) {
        coef_[(e * n_ + x) * m_ + k] += p * model.mu(y);
      });
      return;
    }
    coef_.assign(edges * m_, 0.0);
    for_each_joint_traversal(model, paths, [&](EdgeId e, std::size_t k, Vertex x, Vertex y, double p) {
      double kernel = 1.0;
      if (kind_ == ObjectiveKind::TransportK) kernel = objective.rho(x, y) * objective.rho(x, y);
      if (kind_ == ObjectiveKind::WeightedPoincare) kernel = 2.0 * objective.phi[x];
      coef_[e * m_ + k] += p * kernel * model.mu(x) * model.mu(y);
    });
  }

  void per_edge(std::span<const double> w, std::vector<double>& out) const {
    const std::size_t edges = model_.edge_count();
    out.resize(edges);
    if (kind_ == ObjectiveKind::LogSobolev) {
      const double log_c = std::log(std::exp(2.0) + 1.0);
      load_.resize(n_);
      for (EdgeId e = 0; e < edges; ++e) {
        for (Vertex x = 0; x < n_; ++x) {
          const double* row = &coef_[(e * n_ + x) * m_];
          load_[x] = std::inner_product(row, row + m_, w.begin(), 0.0);
        }
        const double ent = std::max(0.0, entropy(model_.mu(), load_));
        out[e] = (ent + model_.mean(load_) * log_c) / (model_.conductance(e) * w[e / 2]);
      }
      return;
    }
    for (EdgeId e = 0; e < edges; ++e) {
      const double* row = &coef_[e * m_];
      out[e] = std::inner_product(row, row + m_, w.begin(), 0.0) / (model_.conductance(e) * w[e / 2]);
    }
  }

  double operator()(std::span<const double> w) const {
    per_edge(w, scratch_);
    return *std::max_element(scratch_.begin(), scratch_.end());
  }

  /// Log-sum-exp smoothing of the max with sharpness beta (beta = inf gives the max).
  double smoothed(std::span<const double> w, double beta) const {
    per_edge(w, scratch_);
    const double top = *std::max_element(scratch_.begin(), scratch_.end());
    if (!std::isfinite(beta)) return top;
    double s = 0.0;
    for (double h : scratch_) s += std::exp(beta * (h - top));
    return top + std::log(s) / beta;
  }

 private:
  const ReversibleModel& model_;
  ObjectiveKind kind_;
  std::size_t n_, m_;
  std::vector<double> coef_;
  mutable std::vector<double> load_, scratch_;
};

struct OptimizeConfig {
  std::size_t restarts = 8;
  std::size_t max_iters = 500;  // sweeps per smoothing stage
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool smoothing = true;
};

struct OptimizationResult {
  LengthFunction w_best;
  double value_best = 0.0;
  double value_at_uniform = 0.0;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  std::size_t best_start = 0;
  bool converged = false;
  std::vector<double> trace;  // best value after each sweep of the winning start
};

namespace detail {

struct DescentRun {
  std::vector<double> w;
  double value = std::numeric_limits<double>::infinity();
  std::size_t sweeps = 0;
  bool converged = false;
  std::vector<double> trace;
};

inline double golden_section(const std::function<double(double)>& fn, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return fc < fd ? c : d;
}

inline void renormalize(std::vector<double>& w) {
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  const double c = static_cast<double>(w.size()) / s;
  for (double& v : w) v *= c;
}

// Cyclic coordinate descent in log w with a golden-section line search per
// coordinate over log w in [current - 6, current + 6]. With smoothing the
// max over edges is replaced by log-sum-exp of increasing sharpness before a
// final pass on the max itself: coordinate moves stall at ties of the max.
inline DescentRun coordinate_descent(const CompiledObjective& objective, std::vector<double> w,
                                     const OptimizeConfig& config) {
  DescentRun run;
  renormalize(w);
  run.w = w;
  run.value = objective(w);
  std::vector<double> betas;
  if (config.smoothing) {
    const double scale = std::max(run.value, std::numeric_limits<double>::min());
    for (double sharp : {1e1, 1e2, 1e3, 1e4, 1e5, 1e6}) betas.push_back(sharp / scale);
  }
  betas.push_back(std::numeric_limits<double>::infinity());

  for (double beta : betas) {
    double current = objective.smoothed(w, beta);
    bool stage_converged = false;
    for (std::size_t sweep = 0; sweep < config.max_iters; ++sweep) {
      const double before = current;
      for (std::size_t k = 0; k < w.size(); ++k) {
        const double base = std::log(w[k]);
        auto along = [&](double t) {
          const double saved = w[k];
          w[k] = std::exp(t);
          const double v = objective.smoothed(w, beta);
          w[k] = saved;
          return v;
        };
        const double t = golden_section(along, base - 6.0, base + 6.0, 1e-7);
        const double cand = along(t);
        if (cand < current) {
          w[k] = std::exp(t);
          current = cand;
        }
      }
      renormalize(w);
      current = objective.smoothed(w, beta);
      ++run.sweeps;
      const double exact = objective(w);
      if (exact < run.value) {
        run.value = exact;
        run.w = w;
      }
      run.trace.push_back(run.value);
      if (before - current < config.tol * std::max(1.0, std::abs(before))) {
        stage_converged = true;
        break;
      }
    }
    run.converged = stage_converged;
  }
  return run;
}

}  // namespace detail

/// Multi-start coordinate descent over length functions. Starts: w = 1,
/// w = 1/Q, then config.restarts log-uniform draws from [1/4, 4].
inline OptimizationResult optimize_w(const ReversibleModel& model, const PathSystem& paths, const Objective& objective,
                                     const OptimizeConfig& config = {}) {
  validate(model, objective);
  const CompiledObjective compiled(model, paths, objective);
  const std::size_t m = model.undirected_count();

  std::vector<std::vector<double>> starts;
  starts.emplace_back(m, 1.0);
  {
    const auto inv = LengthFunction::inverse_conductance(model);
    starts.emplace_back(inv.values().begin(), inv.values().end());
  }
  for (std::size_t r = 0; r < config.restarts; ++r) {
    std::mt19937_64 rng(stream_seed(config.seed, r));
    std::uniform_real_distribution<double> log_w(std::log(0.25), std::log(4.0));
    std::vector<double> w(m);
    for (double& v : w) v = std::exp(log_w(rng));
    starts.push_back(std::move(w));
  }

  std::vector<detail::DescentRun> runs(starts.size());
  if (config.threads > 1) {
    // Each task owns a compiled copy; the scratch buffers are not shared.
    std::vector<std::future<detail::DescentRun>> tasks;
    for (std::size_t i = 0; i < starts.size(); ++i)
      tasks.push_back(std::async(std::launch::async, [&, i] {
        const CompiledObjective local(model, paths, objective);
        return detail::coordinate_descent(local, starts[i], config);
      }));
    for (std::size_t i = 0; i < tasks.size(); ++i) runs[i] = tasks[i].get();
  } else {
    for (std::size_t i = 0; i < starts.size(); ++i) runs[i] = detail::coordinate_descent(compiled, starts[i], config);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].value < runs[best].value) best = i;

  OptimizationResult out;
  out.w_best = LengthFunction(runs[best].w);
  out.value_best = evaluate(model, paths, objective, out.w_best);
  out.value_at_uniform = evaluate(model, paths, objective, LengthFunction::uniform(model));
  out.restarts = config.restarts;
  out.best_start = best;
  out.converged = runs[best].converged;
  out.trace = runs[best].trace;
  for (const auto& r : runs) out.iterations += r.sweeps;
  return out;
}

}  // namespace pathineq
