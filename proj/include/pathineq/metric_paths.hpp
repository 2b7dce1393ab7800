#pragma once

// Length functions, metrics on the vertex set, geodesic counting and path
// systems with exact per-edge traversal expectations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pathineq/error.hpp"
#include "pathineq/graph_core.hpp"

namespace pathineq {

/// Positive symmetric edge weights, stored per non-oriented edge.
class LengthFunction {
 public:
  LengthFunction() = default;
  explicit LengthFunction(std::vector<double> per_undirected) : w_(std::move(per_undirected)) {
    for (double v : w_)
      if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::BadParams, "length function must be positive");
  }

  static LengthFunction uniform(const ReversibleModel& model) {
    return LengthFunction(std::vector<double>(model.undirected_count(), 1.0));
  }
  static LengthFunction inverse_conductance(const ReversibleModel& model) {
    std::vector<double> w(model.undirected_count());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = 1.0 / model.conductance(2 * k);
    return LengthFunction(std::move(w));
  }

  double operator()(EdgeId e) const { return w_[e / 2]; }
  double undirected(std::size_t k) const { return w_[k]; }
  std::span<const double> values() const { return w_; }
  std::size_t size() const { return w_.size(); }

  bool is_unit() const {
    return std::all_of(w_.begin(), w_.end(), [](double v) { return v == 1.0; });
  }

  LengthFunction scaled(double c) const {
    auto w = w_;
    for (double& v : w) v *= c;
    return LengthFunction(std::move(w));
  }

 private:
  std::vector<double> w_;
};

enum class MetricKind { Graph, Discrete, LengthInduced, WeightedDiscrete, Custom };

constexpr std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Graph: return "graph";
    case MetricKind::Discrete: return "discrete";
    case MetricKind::LengthInduced: return "w-induced";
    case MetricKind::WeightedDiscrete: return "weighted-discrete";
    case MetricKind::Custom: return "custom";
  }
  return "unknown";
}

/// Dense symmetric distance matrix with zero diagonal.
class Metric {
 public:
  Metric() = default;
  Metric(std::size_t n, std::vector<double> rho, MetricKind kind) : n_(n), rho_(std::move(rho)), kind_(kind) {
    if (rho_.size() != n * n) throw Error(ErrorKind::BadParams, "metric matrix has wrong size");
    for (std::size_t x = 0; x < n; ++x) {
      if (rho_[x * n + x] != 0.0) throw Error(ErrorKind::BadParams, "metric diagonal must vanish");
      for (std::size_t y = 0; y < n; ++y) {
        const double v = rho_[x * n + y];
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::BadParams, "metric entries must be finite and >= 0");
        if (v != rho_[y * n + x]) throw Error(ErrorKind::BadParams, "metric must be symmetric");
      }
    }
  }

  static Metric discrete(std::size_t n) {
    std::vector<double> rho(n * n, 1.0);
    for (std::size_t x = 0; x < n; ++x) rho[x * n + x] = 0.0;
    return Metric(n, std::move(rho), MetricKind::Discrete);
  }

  /// rho(x,y) = 1_{x != y} (phi(x) + phi(y)).
  static Metric weighted_discrete(std::span<const double> phi) {
    const std::size_t n = phi.size();
    std::vector<double> rho(n * n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      if (phi[x] < 0.0) throw Error(ErrorKind::NegativePhi, "phi must be nonnegative");
      for (std::size_t y = 0; y < n; ++y)
        if (x != y) rho[x * n + y] = phi[x] + phi[y];
    }
    return Metric(n, std::move(rho), MetricKind::WeightedDiscrete);
  }

  double operator()(Vertex x, Vertex y) const { return rho_[x * n_ + y]; }
  std::size_t size() const { return n_; }
  MetricKind kind() const { return kind_; }
  std::span<const double> matrix() const { return rho_; }

  double max_triangle_violation() const {
    double worst = 0.0;
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = 0; y < n_; ++y)
        for (std::size_t z = 0; z < n_; ++z)
          worst = std::max(worst, (*this)(x, z) - (*this)(x, y) - (*this)(y, z));
    return worst;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> rho_;
  MetricKind kind_ = MetricKind::Custom;
};

/// Shortest-path distances under w (Floyd-Warshall). Tagged as the graph
/// metric when w is identically one.
inline Metric all_pairs_distance(const ReversibleModel& model, const LengthFunction& w) {
  const std::size_t n = model.vertex_count();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(n * n, inf);
  for (Vertex x = 0; x < n; ++x) d[x * n + x] = 0.0;
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    auto& slot = d[model.from(e) * n + model.to(e)];
    slot = std::min(slot, w(e));
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d[i * n + k];
      if (dik == inf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double cand = dik + d[k * n + j];
        if (cand < d[i * n + j]) d[i * n + j] = cand;
      }
    }
  // Floating sums are order dependent; pin exact symmetry.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[j * n + i] = d[i * n + j] = std::min(d[i * n + j], d[j * n + i]);
  return Metric(n, std::move(d), w.is_unit() ? MetricKind::Graph : MetricKind::LengthInduced);
}

inline Metric graph_metric(const ReversibleModel& model) {
  return all_pairs_distance(model, LengthFunction::uniform(model));
}

/// Per-pair unit-length geodesic data. sigma counts geodesics; wsum is the
/// total w-length summed over all geodesics of the pair.
class GeodesicTable {
 public:
  GeodesicTable() = default;

  GeodesicTable(const ReversibleModel& model, const LengthFunction& w) : n_(model.vertex_count()) {
    const std::size_t n = n_;
    dist_.assign(n * n, kUnreached);
    sigma_.assign(n * n, 0.0);
    wsum_.assign(n * n, 0.0);
    std::vector<Vertex> order;
    order.reserve(n);
    for (Vertex s = 0; s < n; ++s) {
      order.clear();
      std::size_t* dist = &dist_[s * n];
      double* sigma = &sigma_[s * n];
      double* wsum = &wsum_[s * n];
      dist[s] = 0;
      sigma[s] = 1.0;
      order.push_back(s);
      for (std::size_t head = 0; head < order.size(); ++head) {
        const Vertex v = order[head];
        for (EdgeId e : model.out_edges(v)) {
          const Vertex t = model.to(e);
          if (dist[t] == kUnreached) {
            dist[t] = dist[v] + 1;
            order.push_back(t);
          }
          if (dist[t] == dist[v] + 1) {
            sigma[t] += sigma[v];
            wsum[t] += wsum[v] + sigma[v] * w(e);
          }
        }
      }
    }
  }

  std::size_t distance(Vertex x, Vertex y) const { return dist_[x * n_ + y]; }
  double count(Vertex x, Vertex y) const { return sigma_[x * n_ + y]; }
  double wlength_sum(Vertex x, Vertex y) const { return wsum_[x * n_ + y]; }
  std::size_t size() const { return n_; }

  bool on_geodesic(const ReversibleModel& model, EdgeId e, Vertex x, Vertex y) const {
    const Vertex u = model.from(e), v = model.to(e);
    return distance(x, u) + 1 + distance(v, y) == distance(x, y);
  }

  /// Number of x->y geodesics that traverse e in its orientation.
  double through_count(const ReversibleModel& model, EdgeId e, Vertex x, Vertex y) const {
    if (!on_geodesic(model, e, x, y)) return 0.0;
    return count(x, model.from(e)) * count(model.to(e), y);
  }

  /// Total w-length of the x->y geodesics through e.
  double through_wlength(const ReversibleModel& model, const LengthFunction& w, EdgeId e, Vertex x,
                         Vertex y) const {
    if (!on_geodesic(model, e, x, y)) return 0.0;
    const Vertex u = model.from(e), v = model.to(e);
    return wlength_sum(x, u) * count(v, y) + count(x, u) * count(v, y) * w(e) + count(x, u) * wlength_sum(v, y);
  }

 private:
  static constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
  std::size_t n_ = 0;
  std::vector<std::size_t> dist_;
  std::vector<double> sigma_;
  std::vector<double> wsum_;
};

enum class PathMode { UniformGeodesic, Explicit, TreeUnique };

constexpr std::string_view to_string(PathMode mode) {
  switch (mode) {
    case PathMode::UniformGeodesic: return "uniform-geodesic";
    case PathMode::Explicit: return "explicit";
    case PathMode::TreeUnique: return "tree-unique";
  }
  return "unknown";
}

struct PathSpec {
  Vertex from;
  Vertex to;
  std::vector<Vertex> vertices;
};

/// A distribution over circle-free paths per ordered pair. Explicit and tree
/// systems hold one path per pair; the uniform-geodesic system is kept
/// implicit through geodesic counts.
class PathSystem {
 public:
  PathMode mode() const { return mode_; }
  std::size_t size() const { return n_; }

  /// Oriented edges that carry probability for the pair (x,y).
  std::span<const EdgeId> support(Vertex x, Vertex y) const { return routes_[x * n_ + y]; }

  /// Unit-length geodesic data; populated in uniform-geodesic mode.
  const GeodesicTable& unit_geodesics() const { return unit_; }

  static PathSystem uniform_geodesic(const ReversibleModel& model) {
    PathSystem ps(model.vertex_count(), PathMode::UniformGeodesic);
    ps.unit_ = GeodesicTable(model, LengthFunction::uniform(model));
    for (Vertex x = 0; x < ps.n_; ++x)
      for (Vertex y = 0; y < ps.n_; ++y) {
        if (x == y) continue;
        auto& r = ps.routes_[x * ps.n_ + y];
        for (EdgeId e = 0; e < model.edge_count(); ++e)
          if (ps.unit_.on_geodesic(model, e, x, y)) r.push_back(e);
      }
    return ps;
  }

  /// One path per ordered pair x != y; every pair must be covered.
  static PathSystem explicit_paths(const ReversibleModel& model, std::span<const PathSpec> paths) {
    const std::size_t n = model.vertex_count();
    PathSystem ps(n, PathMode::Explicit);
    std::vector<char> covered(n * n, 0);
    for (const auto& p : paths) {
      if (p.from >= n || p.to >= n || p.from == p.to)
        throw Error(ErrorKind::InvalidPath, "path endpoints invalid");
      if (covered[p.from * n + p.to])
        throw Error(ErrorKind::InvalidPath, "pair (" + model.label(p.from) + "," + model.label(p.to) + ") given twice");
      ps.routes_[p.from * n + p.to] = validate(model, p);
      covered[p.from * n + p.to] = 1;
    }
    for (Vertex x = 0; x < n; ++x)
      for (Vertex y = 0; y < n; ++y)
        if (x != y && !covered[x * n + y])
          throw Error(ErrorKind::InvalidPath, "no path for pair (" + model.label(x) + "," + model.label(y) + ")");
    return ps;
  }

  /// The unique circle-free path of a tree.
  static PathSystem tree_unique(const ReversibleModel& model) {
    const std::size_t n = model.vertex_count();
    if (model.undirected_count() + 1 != n) throw Error(ErrorKind::NotATree, "graph has a cycle");
    PathSystem ps(n, PathMode::TreeUnique);
    std::vector<EdgeId> parent_edge(n);
    std::vector<char> seen(n);
    for (Vertex s = 0; s < n; ++s) {
      std::fill(seen.begin(), seen.end(), 0);
      std::vector<Vertex> order{s};
      seen[s] = 1;
      for (std::size_t head = 0; head < order.size(); ++head) {
        for (EdgeId e : model.out_edges(order[head])) {
          const Vertex t = model.to(e);
          if (seen[t]) continue;
          seen[t] = 1;
          parent_edge[t] = e;
          order.push_back(t);
        }
      }
      for (Vertex y = 0; y < n; ++y) {
        if (y == s) continue;
        auto& r = ps.routes_[s * n + y];
        for (Vertex v = y; v != s; v = model.from(parent_edge[v])) r.push_back(parent_edge[v]);
        std::reverse(r.begin(), r.end());
      }
    }
    return ps;
  }

 private:
  PathSystem(std::size_t n, PathMode mode) : n_(n), mode_(mode), routes_(n * n) {}

  static std::vector<EdgeId> validate(const ReversibleModel& model, const PathSpec& p) {
    const auto& vs = p.vertices;
    if (vs.size() < 2 || vs.front() != p.from || vs.back() != p.to)
      throw Error(ErrorKind::InvalidPath, "path does not run from its source to its target");
    std::vector<char> seen(model.vertex_count(), 0);
    std::vector<EdgeId> edges;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (vs[i] >= model.vertex_count()) throw Error(ErrorKind::InvalidPath, "unknown vertex in path");
      if (seen[vs[i]]) throw Error(ErrorKind::InvalidPath, "path repeats vertex " + model.label(vs[i]));
      seen[vs[i]] = 1;
      if (i == 0) continue;
      auto e = model.find_edge(vs[i - 1], vs[i]);
      if (!e) throw Error(ErrorKind::InvalidPath, "path uses a non-edge (" + model.label(vs[i - 1]) + "," + model.label(vs[i]) + ")");
      edges.push_back(*e);
    }
    return edges;
  }

  std::size_t n_ = 0;
  PathMode mode_ = PathMode::Explicit;
  std::vector<std::vector<EdgeId>> routes_;
  GeodesicTable unit_;
};

inline PathSystem path_system(const ReversibleModel& model, PathMode mode, std::span<const PathSpec> explicit_list = {}) {
  switch (mode) {
    case PathMode::UniformGeodesic: return PathSystem::uniform_geodesic(model);
    case PathMode::TreeUnique: return PathSystem::tree_unique(model);
    case PathMode::Explicit: return PathSystem::explicit_paths(model, explicit_list);
  }
  throw Error(ErrorKind::BadParams, "unknown path mode");
}

/// Calls fn(e, x, y, P[e in gamma_xy], E[1{e in gamma_xy} |gamma_xy|_w]) for
/// every pair x != y and every edge in the support of its path distribution.
template <class Fn>
void for_each_traversal(const ReversibleModel& model, const PathSystem& paths, const LengthFunction& w, Fn&& fn) {
  const std::size_t n = model.vertex_count();
  if (paths.mode() == PathMode::UniformGeodesic) {
    const GeodesicTable table(model, w);
    for (Vertex x = 0; x < n; ++x)
      for (Vertex y = 0; y < n; ++y) {
        if (x == y) continue;
        const double total = table.count(x, y);
        for (EdgeId e : paths.support(x, y)) {
          const Vertex u = model.from(e), v = model.to(e);
          const double through = table.count(x, u) * table.count(v, y);
          const double wlen =
              table.wlength_sum(x, u) * table.count(v, y) + through * w(e) + table.count(x, u) * table.wlength_sum(v, y);
          fn(e, x, y, through / total, wlen / total);
        }
      }
    return;
  }
  for (Vertex x = 0; x < n; ++x)
    for (Vertex y = 0; y < n; ++y) {
      if (x == y) continue;
      const auto route = paths.support(x, y);
      double len = 0.0;
      for (EdgeId e : route) len += w(e);
      for (EdgeId e : route) fn(e, x, y, 1.0, len);
    }
}

/// Calls fn(e, k, x, y, P[e in gamma_xy and k in gamma_xy]) where k is the
/// non-oriented index of a second edge on the same path (k may be e's own).
/// Since E[1{e in gamma} |gamma|_w] = sum_k w_k P[e, k in gamma], every
/// path-length expectation is linear in w with these coefficients.
template <class Fn>
void for_each_joint_traversal(const ReversibleModel& model, const PathSystem& paths, Fn&& fn) {
  const std::size_t n = model.vertex_count();
  if (paths.mode() == PathMode::UniformGeodesic) {
    const GeodesicTable& t = paths.unit_geodesics();
    for (Vertex x = 0; x < n; ++x)
      for (Vertex y = 0; y < n; ++y) {
        if (x == y) continue;
        const double total = t.count(x, y);
        const std::size_t d = t.distance(x, y);
        const auto support = paths.support(x, y);
        for (EdgeId e : support) {
          const Vertex u = model.from(e), v = model.to(e);
          for (EdgeId f : support) {
            const Vertex a = model.from(f), b = model.to(f);
            double both = 0.0;
            if (e == f) {
              both = t.count(x, u) * t.count(v, y);
            } else if (t.distance(x, u) + 1 + t.distance(v, a) + 1 + t.distance(b, y) == d) {
              both = t.count(x, u) * t.count(v, a) * t.count(b, y);
            } else if (t.distance(x, a) + 1 + t.distance(b, u) + 1 + t.distance(v, y) == d) {
              both = t.count(x, a) * t.count(b, u) * t.count(v, y);
            }
            if (both != 0.0) fn(e, ReversibleModel::undirected(f), x, y, both / total);
          }
        }
      }
    return;
  }
  for (Vertex x = 0; x < n; ++x)
    for (Vertex y = 0; y < n; ++y) {
      if (x == y) continue;
      const auto route = paths.support(x, y);
      for (EdgeId e : route)
        for (EdgeId f : route) fn(e, ReversibleModel::undirected(f), x, y, 1.0);
    }
}

enum class Traversal {
  Length,     // weight E[1{e in gamma} |gamma|_w]
  Indicator,  // weight P[e in gamma]
};

/// h(e) = sum_{x,y} E[1{e in gamma_xy} (|gamma_xy|_w or 1)] kernel(x,y) mu(x) mu(y).
template <class Kernel>
std::vector<double> edge_expectation(const ReversibleModel& model, const PathSystem& paths, const LengthFunction& w,
                                     Kernel&& kernel, Traversal weighting = Traversal::Length) {
  std::vector<double> h(model.edge_count(), 0.0);
  for_each_traversal(model, paths, w, [&](EdgeId e, Vertex x, Vertex y, double prob, double wlen) {
    const double weight = weighting == Traversal::Length ? wlen : prob;
    h[e] += weight * kernel(x, y) * model.mu(x) * model.mu(y);
  });
  return h;
}

/// Largest number of (ordered-pair) unit geodesics through one oriented edge.
inline std::uint64_t b_constant(const ReversibleModel& model) {
  const GeodesicTable table(model, LengthFunction::uniform(model));
  const std::size_t n = model.vertex_count();
  double best = 0.0;
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    double total = 0.0;
    for (Vertex x = 0; x < n; ++x)
      for (Vertex y = 0; y < n; ++y)
        if (x != y) total += table.through_count(model, e, x, y);
    best = std::max(best, total);
  }
  return static_cast<std::uint64_t>(std::llround(best));
}

inline std::size_t diameter(const ReversibleModel& model) {
  const GeodesicTable table(model, LengthFunction::uniform(model));
  std::size_t d = 0;
  for (Vertex x = 0; x < model.vertex_count(); ++x)
    for (Vertex y = 0; y < model.vertex_count(); ++y) d = std::max(d, table.distance(x, y));
  return d;
}

}  // namespace pathineq
