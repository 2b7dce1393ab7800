#pragma once

// Automorphism orbits of small graphs and the symmetric-graph bounds on
// kappa and K for the simple random walk with the graph metric.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pathineq/bounds.hpp"
#include "pathineq/error.hpp"
#include "pathineq/graph_core.hpp"
#include "pathineq/metric_paths.hpp"

namespace pathineq {

struct EdgeOrbits {
  std::vector<std::size_t> orbit_of_edge;  // per non-oriented edge
  std::vector<std::size_t> orbit_sizes;
  double index = 1.0;                      // max_i |E0| / |E0_i|
  bool edge_transitive = false;
  bool vertex_transitive = false;
  bool distance_transitive = false;
  std::uint64_t automorphism_count = 0;
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  std::size_t classes() {
    std::size_t c = 0;
    for (std::size_t i = 0; i < parent_.size(); ++i) c += find(i) == i;
    return c;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

inline constexpr std::size_t kMaxAutomorphismVertices = 10;

/// Brute-force automorphism search; limited to 10 vertices.
inline EdgeOrbits edge_orbits(const ReversibleModel& model) {
  const std::size_t n = model.vertex_count();
  if (n > kMaxAutomorphismVertices)
    throw Error(ErrorKind::TooLarge, "automorphism search limited to " + std::to_string(kMaxAutomorphismVertices) + " vertices");
  const std::size_t m = model.undirected_count();
  std::vector<char> adj(n * n, 0);
  std::map<std::pair<Vertex, Vertex>, std::size_t> edge_index;
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    adj[model.from(e) * n + model.to(e)] = 1;
    edge_index[{model.from(e), model.to(e)}] = ReversibleModel::undirected(e);
  }
  const GeodesicTable unit(model, LengthFunction::uniform(model));

  detail::DisjointSets vertex_sets(n), edge_sets(m), pair_sets(n * n);
  std::vector<Vertex> image(n);
  std::vector<char> used(n, 0);
  std::uint64_t count = 0;

  auto record = [&] {
    ++count;
    for (Vertex x = 0; x < n; ++x) vertex_sets.unite(x, image[x]);
    for (EdgeId e = 0; e < model.edge_count(); e += 2)
      edge_sets.unite(e / 2, edge_index.at({image[model.from(e)], image[model.to(e)]}));
    for (Vertex x = 0; x < n; ++x)
      for (Vertex y = 0; y < n; ++y) pair_sets.unite(x * n + y, image[x] * n + image[y]);
  };

  auto extend = [&](auto&& self, Vertex x) -> void {
    if (x == n) {
      record();
      return;
    }
    for (Vertex c = 0; c < n; ++c) {
      if (used[c] || model.degree(c) != model.degree(x)) continue;
      bool ok = true;
      for (Vertex y = 0; y < x && ok; ++y) ok = adj[x * n + y] == adj[c * n + image[y]];
      if (!ok) continue;
      used[c] = 1;
      image[x] = c;
      self(self, x + 1);
      used[c] = 0;
    }
  };
  extend(extend, 0);

  EdgeOrbits out;
  out.automorphism_count = count;
  std::map<std::size_t, std::size_t> ids;
  out.orbit_of_edge.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto root = edge_sets.find(k);
    auto [it, fresh] = ids.emplace(root, ids.size());
    if (fresh) out.orbit_sizes.push_back(0);
    out.orbit_of_edge[k] = it->second;
    ++out.orbit_sizes[it->second];
  }
  const std::size_t smallest = *std::min_element(out.orbit_sizes.begin(), out.orbit_sizes.end());
  out.index = static_cast<double>(m) / static_cast<double>(smallest);
  out.edge_transitive = out.orbit_sizes.size() == 1;
  out.vertex_transitive = vertex_sets.classes() == 1;

  // Distance-transitive: ordered pairs at equal distance form one orbit each.
  std::map<std::size_t, std::size_t> root_distance;
  bool dt = true;
  for (Vertex x = 0; x < n && dt; ++x)
    for (Vertex y = 0; y < n && dt; ++y) {
      const auto root = pair_sets.find(x * n + y);
      const auto d = unit.distance(x, y);
      auto [it, fresh] = root_distance.emplace(root, d);
      if (!fresh && it->second != d) dt = false;
    }
  std::map<std::size_t, std::size_t> orbits_per_distance;
  for (const auto& [root, d] : root_distance) ++orbits_per_distance[d];
  for (const auto& [d, c] : orbits_per_distance) dt = dt && c == 1;
  out.distance_transitive = dt && out.vertex_transitive;
  return out;
}

/// Symmetry class of a graph, either asserted by the caller or found by
/// edge_orbits.
struct SymmetryClass {
  bool edge_transitive = false;
  bool vertex_transitive = false;
  bool distance_transitive = false;
  double index = 1.0;
  std::string source = "asserted";

  static SymmetryClass verified(const EdgeOrbits& orbits) {
    return {orbits.edge_transitive, orbits.vertex_transitive, orbits.distance_transitive, orbits.index, "edge_orbits"};
  }
};

/// E_{mu x mu}[rho_1^p(X,Y)] and E_mu[rho_1^p(X,v0)].
inline double pair_moment(const ReversibleModel& model, const GeodesicTable& unit, int power) {
  double s = 0.0;
  for (Vertex x = 0; x < model.vertex_count(); ++x)
    for (Vertex y = 0; y < model.vertex_count(); ++y)
      s += model.mu(x) * model.mu(y) * std::pow(static_cast<double>(unit.distance(x, y)), power);
  return s;
}

inline double rooted_moment(const ReversibleModel& model, const GeodesicTable& unit, Vertex v0, int power) {
  double s = 0.0;
  for (Vertex x = 0; x < model.vertex_count(); ++x)
    s += model.mu(x) * std::pow(static_cast<double>(unit.distance(x, v0)), power);
  return s;
}

inline BoundReport symmetry_bounds(const ReversibleModel& model, const SymmetryClass& sym, Vertex v0 = 0) {
  if (!model.is_laplacian()) throw Error(ErrorKind::NotLaplacian, "symmetry bounds need the simple random walk");
  if (v0 >= model.vertex_count()) throw Error(ErrorKind::BadParams, "v0 out of range");
  const GeodesicTable unit(model, LengthFunction::uniform(model));
  const std::map<std::string, std::string> inputs{
      {"metric", "graph"}, {"paths", "uniform-geodesic"}, {"symmetry_source", sym.source}};
  BoundReport r;
  if (sym.edge_transitive || sym.vertex_transitive) r.add("index", sym.index, formula::kEdgeOrbitIndex, inputs);
  if (sym.edge_transitive) r.add("kappa_edge_transitive", pair_moment(model, unit, 2), formula::kEdgeTransitiveKappa, inputs);
  if (sym.vertex_transitive || sym.distance_transitive) {
    const double target = 1.0 / static_cast<double>(model.vertex_count());
    for (Vertex x = 0; x < model.vertex_count(); ++x)
      if (std::abs(model.mu(x) - target) > 1e-12) throw Error(ErrorKind::NotUniform, "reversible measure is not uniform");
    auto with_root = inputs;
    with_root["v0"] = model.label(v0);
    if (sym.vertex_transitive) {
      r.add("kappa_vertex_transitive", sym.index * rooted_moment(model, unit, v0, 2), formula::kVertexTransitiveKappa, with_root);
      r.add("K_vertex_transitive", sym.index * rooted_moment(model, unit, v0, 4), formula::kVertexTransitiveK, with_root);
    }
    if (sym.distance_transitive) {
      r.add("kappa_distance_transitive", rooted_moment(model, unit, v0, 2), formula::kDistanceTransitiveKappa, with_root);
      r.add("K_distance_transitive", rooted_moment(model, unit, v0, 4), formula::kDistanceTransitiveK, with_root);
    }
  }
  return r;
}

inline BoundReport symmetry_bounds(const ReversibleModel& model, Vertex v0 = 0) {
  return symmetry_bounds(model, SymmetryClass::verified(edge_orbits(model)), v0);
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

/// sum_{j} j^2 C(k,j) C(n-k,j) / C(n,k): the distance-transitive kappa bound on J(n,k).
inline double johnson_kappa_formula(std::size_t n, std::size_t k) {
  if (k < 1 || k + 1 > n) throw Error(ErrorKind::BadParams, "johnson formula needs 1 <= k <= n-1");
  double s = 0.0;
  for (std::size_t j = 0; j <= std::min(k, n - k); ++j)
    s += static_cast<double>(j * j) * binomial(k, j) * binomial(n - k, j);
  return s / binomial(n, k);
}

}  // namespace pathineq
