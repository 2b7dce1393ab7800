#pragma once

// Basic functionals of observables under the reversible measure.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "pathineq/graph_core.hpp"

namespace pathineq {

/// t log t with the continuous extension 0 log 0 = 0.
inline double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

/// E(f,g) = 1/2 sum over oriented edges of D_e f D_e g Q(e).
inline double dirichlet_form(const ReversibleModel& model, std::span<const double> f, std::span<const double> g) {
  double s = 0.0;
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    const Vertex x = model.from(e), y = model.to(e);
    s += (f[y] - f[x]) * (g[y] - g[x]) * model.conductance(e);
  }
  return 0.5 * s;
}

inline double dirichlet_form(const ReversibleModel& model, std::span<const double> f) {
  return dirichlet_form(model, f, f);
}

inline double variance(const ReversibleModel& model, std::span<const double> f) {
  const double m = model.mean(f);
  double s = 0.0;
  for (Vertex x = 0; x < model.vertex_count(); ++x) s += model.mu(x) * (f[x] - m) * (f[x] - m);
  return s;
}

/// Ent(g) = mu(g log g) - mu(g) log mu(g) for g >= 0.
inline double entropy(std::span<const double> mu, std::span<const double> g) {
  double a = 0.0, m = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x) {
    a += mu[x] * xlogx(g[x]);
    m += mu[x] * g[x];
  }
  return a - xlogx(m);
}

/// Ent(f^2).
inline double entropy_of_square(const ReversibleModel& model, std::span<const double> f) {
  std::vector<double> sq(f.size());
  std::transform(f.begin(), f.end(), sq.begin(), [](double v) { return v * v; });
  return entropy(model.mu(), sq);
}

/// Smallest m with mu(f <= m) >= 1/2.
inline double median(const ReversibleModel& model, std::span<const double> f) {
  std::vector<Vertex> order(f.size());
  std::iota(order.begin(), order.end(), Vertex{0});
  std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return f[a] < f[b]; });
  double acc = 0.0;
  for (Vertex x : order) {
    acc += model.mu(x);
    if (acc >= 0.5 - 1e-15) return f[x];
  }
  return f[order.back()];
}

/// sum over oriented edges of |D_e f| Q(e).
inline double total_variation_gradient(const ReversibleModel& model, std::span<const double> f) {
  double s = 0.0;
  for (EdgeId e = 0; e < model.edge_count(); ++e)
    s += std::abs(f[model.to(e)] - f[model.from(e)]) * model.conductance(e);
  return s;
}

}  // namespace pathineq
