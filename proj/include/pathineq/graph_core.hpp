#pragma once

// Finite connected graphs carrying reversible nearest-neighbour jump rates.
//
// Oriented edges of a model come in reverse pairs: edge 2k and 2k+1 are the
// two orientations of the k-th non-oriented edge, so reverse(e) == e ^ 1 and
// the non-oriented index is e / 2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pathineq/error.hpp"

namespace pathineq {

using Vertex = std::size_t;
using EdgeId = std::size_t;

struct RateEdge {
  Vertex from;
  Vertex to;
  double rate;
};

/// Vertex labels plus oriented edges with jump rates. The edge relation must
/// be symmetric; the two rates of a pair may differ.
struct RateGraph {
  std::vector<std::string> vertices;
  std::vector<RateEdge> oriented_edges;

  void add_edge(Vertex u, Vertex v, double q_uv, double q_vu) {
    oriented_edges.push_back({u, v, q_uv});
    oriented_edges.push_back({v, u, q_vu});
  }
};

struct DegreeStats {
  std::size_t d_star = 0;      // max degree
  double max_out_rate = 0.0;   // B = max_x sum_y q(x,y)
  std::size_t edge_count = 0;  // oriented
  std::size_t vertex_count = 0;
};

class ReversibleModel;
ReversibleModel build_model(const RateGraph& graph);
ReversibleModel laplacian_model(std::vector<std::string> labels,
                                std::span<const std::pair<Vertex, Vertex>> edges);

class ReversibleModel {
 public:
  std::size_t vertex_count() const { return labels_.size(); }
  std::size_t edge_count() const { return from_.size(); }
  std::size_t undirected_count() const { return from_.size() / 2; }

  Vertex from(EdgeId e) const { return from_[e]; }
  Vertex to(EdgeId e) const { return to_[e]; }
  double rate(EdgeId e) const { return rate_[e]; }
  double conductance(EdgeId e) const { return conductance_[e]; }
  static EdgeId reverse(EdgeId e) { return e ^ 1U; }
  static std::size_t undirected(EdgeId e) { return e / 2; }

  double mu(Vertex x) const { return mu_[x]; }
  std::span<const double> mu() const { return mu_; }
  std::span<const EdgeId> out_edges(Vertex x) const { return adjacency_[x]; }
  std::size_t degree(Vertex x) const { return adjacency_[x].size(); }

  const std::string& label(Vertex x) const { return labels_[x]; }
  std::span<const std::string> labels() const { return labels_; }

  std::optional<Vertex> index_of(std::string_view label) const {
    for (Vertex x = 0; x < labels_.size(); ++x)
      if (labels_[x] == label) return x;
    return std::nullopt;
  }

  std::optional<EdgeId> find_edge(Vertex x, Vertex y) const {
    for (EdgeId e : adjacency_[x])
      if (to_[e] == y) return e;
    return std::nullopt;
  }

  /// True when q(x,y) = 1/d_x, in which case mu and Q are set exactly.
  bool is_laplacian() const { return laplacian_; }

  /// Expectation of f under mu.
  double mean(std::span<const double> f) const {
    double s = 0.0;
    for (Vertex x = 0; x < mu_.size(); ++x) s += mu_[x] * f[x];
    return s;
  }

 private:
  friend ReversibleModel build_model(const RateGraph&);
  friend ReversibleModel laplacian_model(std::vector<std::string>,
                                         std::span<const std::pair<Vertex, Vertex>>);
  ReversibleModel() = default;

  std::vector<std::string> labels_;
  std::vector<Vertex> from_;
  std::vector<Vertex> to_;
  std::vector<double> rate_;
  std::vector<double> conductance_;
  std::vector<double> mu_;
  std::vector<std::vector<EdgeId>> adjacency_;
  bool laplacian_ = false;
};

namespace detail {

struct PairedEdges {
  std::vector<Vertex> from, to;
  std::vector<double> rate;
};

// Matches every oriented edge with its reverse and lays them out as 2k, 2k+1
// in order of first appearance.
inline PairedEdges pair_edges(std::size_t n, std::span<const RateEdge> edges) {
  std::map<std::pair<Vertex, Vertex>, double> rates;
  std::vector<std::pair<Vertex, Vertex>> order;
  for (const auto& e : edges) {
    if (e.from >= n || e.to >= n) throw Error(ErrorKind::BadGraph, "edge endpoint out of range");
    if (e.from == e.to) throw Error(ErrorKind::BadGraph, "self-loop at vertex " + std::to_string(e.from));
    if (!(e.rate > 0.0) || !std::isfinite(e.rate))
      throw Error(ErrorKind::NonpositiveRate, "rate on edge (" + std::to_string(e.from) + "," +
                                                  std::to_string(e.to) + ") is not positive");
    if (!rates.emplace(std::pair{e.from, e.to}, e.rate).second)
      throw Error(ErrorKind::BadGraph, "duplicate oriented edge (" + std::to_string(e.from) + "," +
                                           std::to_string(e.to) + ")");
    order.emplace_back(e.from, e.to);
  }
  PairedEdges out;
  std::map<std::pair<Vertex, Vertex>, bool> placed;
  for (const auto& [u, v] : order) {
    if (placed.count({u, v})) continue;
    auto rev = rates.find({v, u});
    if (rev == rates.end())
      throw Error(ErrorKind::BadGraph, "edge relation not symmetric: (" + std::to_string(u) + "," +
                                           std::to_string(v) + ") has no reverse");
    out.from.insert(out.from.end(), {u, v});
    out.to.insert(out.to.end(), {v, u});
    out.rate.insert(out.rate.end(), {rates.at({u, v}), rev->second});
    placed[{u, v}] = placed[{v, u}] = true;
  }
  return out;
}

inline std::vector<std::vector<EdgeId>> adjacency(std::size_t n, const std::vector<Vertex>& from) {
  std::vector<std::vector<EdgeId>> adj(n);
  for (EdgeId e = 0; e < from.size(); ++e) adj[from[e]].push_back(e);
  return adj;
}

inline bool connected(const std::vector<std::vector<EdgeId>>& adj, const std::vector<Vertex>& to) {
  if (adj.empty()) return false;
  std::vector<char> seen(adj.size(), 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    Vertex x = stack.back();
    stack.pop_back();
    for (EdgeId e : adj[x]) {
      if (!seen[to[e]]) {
        seen[to[e]] = 1;
        ++count;
        stack.push_back(to[e]);
      }
    }
  }
  return count == adj.size();
}

}  // namespace detail

/// Derives the reversible measure by propagating mu(y) = mu(x) q(x,y) / q(y,x)
/// along a BFS tree rooted at vertex 0, then checks detailed balance on every
/// edge to relative 1e-9.
inline ReversibleModel build_model(const RateGraph& graph) {
  const std::size_t n = graph.vertices.size();
  if (n == 0) throw Error(ErrorKind::BadGraph, "graph has no vertices");
  auto paired = detail::pair_edges(n, graph.oriented_edges);
  auto adj = detail::adjacency(n, paired.from);
  if (!detail::connected(adj, paired.to)) throw Error(ErrorKind::NotConnected, "graph is not connected");

  std::vector<double> mu(n, 0.0);
  std::vector<char> seen(n, 0);
  std::queue<Vertex> frontier;
  mu[0] = 1.0;
  seen[0] = 1;
  frontier.push(0);
  while (!frontier.empty()) {
    Vertex x = frontier.front();
    frontier.pop();
    for (EdgeId e : adj[x]) {
      Vertex y = paired.to[e];
      if (seen[y]) continue;
      seen[y] = 1;
      mu[y] = mu[x] * paired.rate[e] / paired.rate[e ^ 1U];
      frontier.push(y);
    }
  }
  const double total = std::accumulate(mu.begin(), mu.end(), 0.0);
  for (double& m : mu) m /= total;

  std::vector<double> conductance(paired.from.size());
  for (EdgeId e = 0; e < paired.from.size(); e += 2) {
    const double fwd = mu[paired.from[e]] * paired.rate[e];
    const double bwd = mu[paired.from[e + 1]] * paired.rate[e + 1];
    if (std::abs(fwd - bwd) > 1e-9 * std::max(fwd, bwd))
      throw Error(ErrorKind::NotReversible,
                  "detailed balance fails on edge (" + graph.vertices[paired.from[e]] + "," +
                      graph.vertices[paired.to[e]] + ")");
    conductance[e] = conductance[e + 1] = 0.5 * (fwd + bwd);
  }

  ReversibleModel m;
  m.labels_ = graph.vertices;
  m.from_ = std::move(paired.from);
  m.to_ = std::move(paired.to);
  m.rate_ = std::move(paired.rate);
  m.conductance_ = std::move(conductance);
  m.mu_ = std::move(mu);
  m.adjacency_ = std::move(adj);
  return m;
}

/// Simple random walk: q(x,y) = 1/d_x, mu(x) = d_x/|E|, Q(e) = 1/|E| with |E|
/// the number of oriented edges.
inline ReversibleModel laplacian_model(std::vector<std::string> labels,
                                       std::span<const std::pair<Vertex, Vertex>> edges) {
  const std::size_t n = labels.size();
  if (n == 0) throw Error(ErrorKind::BadGraph, "graph has no vertices");
  std::vector<RateEdge> oriented;
  oriented.reserve(2 * edges.size());
  for (const auto& [u, v] : edges) {
    oriented.push_back({u, v, 1.0});
    oriented.push_back({v, u, 1.0});
  }
  auto paired = detail::pair_edges(n, oriented);
  auto adj = detail::adjacency(n, paired.from);
  if (!detail::connected(adj, paired.to)) throw Error(ErrorKind::NotConnected, "graph is not connected");

  const double total = static_cast<double>(paired.from.size());
  ReversibleModel m;
  m.labels_ = std::move(labels);
  m.mu_.resize(n);
  for (Vertex x = 0; x < n; ++x) m.mu_[x] = static_cast<double>(adj[x].size()) / total;
  for (EdgeId e = 0; e < paired.from.size(); ++e)
    paired.rate[e] = 1.0 / static_cast<double>(adj[paired.from[e]].size());
  m.conductance_.assign(paired.from.size(), 1.0 / total);
  m.from_ = std::move(paired.from);
  m.to_ = std::move(paired.to);
  m.rate_ = std::move(paired.rate);
  m.adjacency_ = std::move(adj);
  m.laplacian_ = true;
  return m;
}

inline DegreeStats degree_stats(const ReversibleModel& model) {
  DegreeStats s;
  s.vertex_count = model.vertex_count();
  s.edge_count = model.edge_count();
  for (Vertex x = 0; x < model.vertex_count(); ++x) {
    s.d_star = std::max(s.d_star, model.degree(x));
    double out = 0.0;
    for (EdgeId e : model.out_edges(x)) out += model.rate(e);
    s.max_out_rate = std::max(s.max_out_rate, out);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Example families

namespace detail {

inline std::vector<std::string> numbered(std::size_t n, std::string_view prefix = "") {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(prefix) + std::to_string(i));
  return out;
}

}  // namespace detail

inline ReversibleModel complete_graph(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::BadParams, "complete graph needs n >= 2");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return laplacian_model(detail::numbered(n), edges);
}

/// Centre v0 and leaves v1..vn.
inline ReversibleModel star_graph(std::size_t leaves) {
  if (leaves < 1) throw Error(ErrorKind::BadParams, "star needs at least one leaf");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex k = 1; k <= leaves; ++k) edges.emplace_back(0, k);
  return laplacian_model(detail::numbered(leaves + 1, "v"), edges);
}

inline ReversibleModel cycle_graph(std::size_t p) {
  if (p < 3) throw Error(ErrorKind::BadParams, "cycle needs p >= 3");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 0; i < p; ++i) edges.emplace_back(i, (i + 1) % p);
  return laplacian_model(detail::numbered(p), edges);
}

/// Full binary tree of depth d in heap order: children of i are 2i+1, 2i+2.
inline ReversibleModel binary_tree(std::size_t depth) {
  if (depth < 1) throw Error(ErrorKind::BadParams, "binary tree needs depth >= 1");
  if (depth > 20) throw Error(ErrorKind::BadParams, "binary tree depth too large");
  const std::size_t n = (std::size_t{1} << (depth + 1)) - 1;
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 1; i < n; ++i) edges.emplace_back((i - 1) / 2, i);
  return laplacian_model(detail::numbered(n), edges);
}

inline ReversibleModel path_graph(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::BadParams, "path needs n >= 2");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return laplacian_model(detail::numbered(n), edges);
}

/// Birth-death chain on {0..n-1}: up[i] = q(i,i+1), down[i] = q(i+1,i).
inline ReversibleModel birth_death(std::span<const double> up, std::span<const double> down) {
  if (up.empty() || up.size() != down.size())
    throw Error(ErrorKind::BadParams, "birth-death chain needs matching non-empty rate lists");
  RateGraph g;
  g.vertices = detail::numbered(up.size() + 1);
  for (Vertex i = 0; i < up.size(); ++i) g.add_edge(i, i + 1, up[i], down[i]);
  return build_model(g);
}

/// k-subsets of {1..n}, adjacent when they share k-1 elements.
inline ReversibleModel johnson_graph(std::size_t n, std::size_t k) {
  if (k < 1 || k + 1 > n) throw Error(ErrorKind::BadParams, "johnson graph needs 1 <= k <= n-1");
  if (n > 20) throw Error(ErrorKind::BadParams, "johnson graph n too large");
  std::vector<unsigned> masks;
  for (unsigned m = 0; m < (1U << n); ++m)
    if (static_cast<std::size_t>(__builtin_popcount(m)) == k) masks.push_back(m);
  std::vector<std::string> labels;
  for (unsigned m : masks) {
    std::string s = "{";
    for (std::size_t i = 0; i < n; ++i) {
      if (m & (1U << i)) {
        if (s.size() > 1) s += ",";
        s += std::to_string(i + 1);
      }
    }
    labels.push_back(s + "}");
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 0; i < masks.size(); ++i)
    for (Vertex j = i + 1; j < masks.size(); ++j)
      if (static_cast<std::size_t>(__builtin_popcount(masks[i] & masks[j])) + 1 == k) edges.emplace_back(i, j);
  return laplacian_model(std::move(labels), edges);
}

/// Dispatch by family name: complete(n), star(n), cycle(p), binary_tree(d),
/// path(n), johnson(n, k).
inline ReversibleModel gallery(std::string_view family, std::span<const long> params) {
  auto need = [&](std::size_t count) {
    if (params.size() != count)
      throw Error(ErrorKind::BadParams, std::string(family) + " expects " + std::to_string(count) + " parameter(s)");
    for (long p : params)
      if (p < 0) throw Error(ErrorKind::BadParams, "negative parameter");
  };
  auto at = [&](std::size_t i) { return static_cast<std::size_t>(params[i]); };
  if (family == "complete") { need(1); return complete_graph(at(0)); }
  if (family == "star") { need(1); return star_graph(at(0)); }
  if (family == "cycle") { need(1); return cycle_graph(at(0)); }
  if (family == "binary_tree" || family == "tree") { need(1); return binary_tree(at(0)); }
  if (family == "path") { need(1); return path_graph(at(0)); }
  if (family == "johnson") { need(2); return johnson_graph(at(0), at(1)); }
  throw Error(ErrorKind::BadParams, "unknown gallery family '" + std::string(family) + "'");
}

}  // namespace pathineq
