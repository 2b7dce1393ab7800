#pragma once

// Shared test fixtures: random reversible models and independent brute-force
// oracles that do not go through the library's path tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "pathineq/pathineq.hpp"

namespace testing_support {

using namespace pathineq;

/// Random connected graph on n vertices: a random spanning tree plus each
/// remaining pair with probability extra.
inline std::vector<std::pair<Vertex, Vertex>> random_connected_edges(std::mt19937_64& rng, std::size_t n,
                                                                     double extra) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::set<std::pair<Vertex, Vertex>> have;
  std::vector<Vertex> order(n);
  for (Vertex i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 1; i < n; ++i) {
    const Vertex parent = order[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)];
    const auto key = std::minmax(parent, order[i]);
    edges.emplace_back(key.first, key.second);
    have.insert(key);
  }
  std::bernoulli_distribution coin(extra);
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b)
      if (!have.count({a, b}) && coin(rng)) {
        edges.emplace_back(a, b);
        have.insert({a, b});
      }
  return edges;
}

/// Reversible rates from a random target measure and random symmetric
/// conductances: q(x,y) = C(x,y) / pi(x).
inline ReversibleModel random_model(std::mt19937_64& rng, std::size_t n, double extra = 0.3) {
  const auto edges = random_connected_edges(rng, n, extra);
  std::uniform_real_distribution<double> unit(0.2, 2.0);
  std::vector<double> pi(n);
  for (double& p : pi) p = unit(rng);
  RateGraph g;
  for (Vertex i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
  for (const auto& [a, b] : edges) {
    const double c = unit(rng);
    g.add_edge(a, b, c / pi[a], c / pi[b]);
  }
  return build_model(g);
}

inline ReversibleModel random_birth_death(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> log_rate(std::log(0.1), std::log(10.0));
  std::vector<double> up(n - 1), down(n - 1);
  for (double& v : up) v = std::exp(log_rate(rng));
  for (double& v : down) v = std::exp(log_rate(rng));
  return birth_death(up, down);
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline ProbabilityVector random_probability(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> d(1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return ProbabilityVector::normalized(std::move(v));
}

inline LengthFunction random_lengths(std::mt19937_64& rng, const ReversibleModel& model) {
  std::uniform_real_distribution<double> d(0.25, 4.0);
  std::vector<double> w(model.undirected_count());
  for (double& x : w) x = d(rng);
  return LengthFunction(std::move(w));
}

/// All unit-length geodesics from x to y by depth-first enumeration, each as
/// a list of oriented edges. Throws past 10^6 paths.
inline std::vector<std::vector<EdgeId>> enumerate_geodesics(const ReversibleModel& model, Vertex x, Vertex y) {
  const std::size_t n = model.vertex_count();
  // Plain BFS distances to y.
  std::vector<long> dist(n, -1);
  std::vector<Vertex> queue{y};
  dist[y] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (EdgeId e : model.out_edges(queue[h]))
      if (dist[model.to(e)] < 0) {
        dist[model.to(e)] = dist[queue[h]] + 1;
        queue.push_back(model.to(e));
      }
  std::vector<std::vector<EdgeId>> out;
  std::vector<EdgeId> current;
  std::function<void(Vertex)> walk = [&](Vertex v) {
    if (v == y) {
      out.push_back(current);
      if (out.size() > 1000000) throw std::runtime_error("geodesic enumeration cap exceeded");
      return;
    }
    for (EdgeId e : model.out_edges(v))
      if (dist[model.to(e)] == dist[v] - 1) {
        current.push_back(e);
        walk(model.to(e));
        current.pop_back();
      }
  };
  walk(x);
  return out;
}

/// h(e) = sum_{x != y} avg over geodesics gamma of 1{e in gamma} |gamma|_w kernel mu mu.
template <class Kernel>
std::vector<double> brute_force_expectation(const ReversibleModel& model, const LengthFunction& w, Kernel kernel,
                                            bool use_length) {
  std::vector<double> h(model.edge_count(), 0.0);
  for (Vertex x = 0; x < model.vertex_count(); ++x)
    for (Vertex y = 0; y < model.vertex_count(); ++y) {
      if (x == y) continue;
      const auto paths = enumerate_geodesics(model, x, y);
      for (const auto& p : paths) {
        double len = 0.0;
        for (EdgeId e : p) len += w(e);
        for (EdgeId e : p)
          h[e] += (use_length ? len : 1.0) * kernel(x, y) * model.mu(x) * model.mu(y) / static_cast<double>(paths.size());
      }
    }
  return h;
}

/// Unique path in a tree, as oriented edges.
inline std::vector<EdgeId> tree_path(const ReversibleModel& model, Vertex x, Vertex y) {
  const auto all = enumerate_geodesics(model, x, y);
  if (all.size() != 1) throw std::runtime_error("not a tree");
  return all.front();
}

/// W1 on a tree metric with unit lengths: sum over edges of |nu1 - nu2| mass
/// on one side of the edge.
inline double tree_w1(const ReversibleModel& model, std::span<const double> nu1, std::span<const double> nu2) {
  double total = 0.0;
  const std::size_t n = model.vertex_count();
  for (EdgeId e = 0; e < model.edge_count(); e += 2) {
    // Side of from(e) after removing the edge.
    std::vector<char> side(n, 0);
    std::vector<Vertex> stack{model.from(e)};
    side[model.from(e)] = 1;
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      for (EdgeId f : model.out_edges(v)) {
        if (f / 2 == e / 2 || side[model.to(f)]) continue;
        side[model.to(f)] = 1;
        stack.push_back(model.to(f));
      }
    }
    double diff = 0.0;
    for (Vertex v = 0; v < n; ++v)
      if (side[v]) diff += nu1[v] - nu2[v];
    total += std::abs(diff);
  }
  return total;
}

/// Smallest oriented edge index from a to b.
inline EdgeId edge(const ReversibleModel& model, const std::string& a, const std::string& b) {
  return *model.find_edge(*model.index_of(a), *model.index_of(b));
}

}  // namespace testing_support
