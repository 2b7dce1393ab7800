#pragma once

// Path-method constants bounding the Poincare, log-Sobolev,
// transport-information and generalized Cheeger constants.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pathineq/error.hpp"
#include "pathineq/functionals.hpp"
#include "pathineq/graph_core.hpp"
#include "pathineq/metric_paths.hpp"

namespace pathineq {

/// Formula tags attached to report entries.
namespace formula {
inline constexpr std::string_view kPoincareInverseConductance = "poincare_paths_inverse_conductance";
inline constexpr std::string_view kPoincareLength = "poincare_paths_length_function";
inline constexpr std::string_view kLogSobolev = "log_sobolev_paths";
inline constexpr std::string_view kWeightedPoincare = "weighted_poincare_paths";
inline constexpr std::string_view kTransportInformation = "transport_information_K";
inline constexpr std::string_view kCheegerKappa = "generalized_cheeger_kappa";
inline constexpr std::string_view kTransportEntropyM = "transport_entropy_jump_moment";
inline constexpr std::string_view kTransportEntropy = "transport_entropy_sqrt_2KM";
inline constexpr std::string_view kGaussianFromCheeger = "gaussian_concentration_kappa2_B";
inline constexpr std::string_view kLaplacianK = "laplacian_K_degree_geodesic";
inline constexpr std::string_view kLaplacianKappa = "laplacian_kappa_degree_geodesic";
inline constexpr std::string_view kEdgeTransitiveKappa = "edge_transitive_kappa";
inline constexpr std::string_view kVertexTransitiveKappa = "vertex_transitive_kappa";
inline constexpr std::string_view kVertexTransitiveK = "vertex_transitive_K";
inline constexpr std::string_view kDistanceTransitiveKappa = "distance_transitive_kappa";
inline constexpr std::string_view kDistanceTransitiveK = "distance_transitive_K";
inline constexpr std::string_view kJohnsonKappa = "johnson_kappa_binomial_sum";
inline constexpr std::string_view kEdgeOrbitIndex = "edge_orbit_index";

inline constexpr std::string_view kAll[] = {
    kPoincareInverseConductance, kPoincareLength, kLogSobolev, kWeightedPoincare, kTransportInformation,
    kCheegerKappa, kTransportEntropyM, kTransportEntropy, kGaussianFromCheeger, kLaplacianK, kLaplacianKappa,
    kEdgeTransitiveKappa, kVertexTransitiveKappa, kVertexTransitiveK, kDistanceTransitiveKappa,
    kDistanceTransitiveK, kJohnsonKappa, kEdgeOrbitIndex};

inline bool known(std::string_view tag) {
  return std::find(std::begin(kAll), std::end(kAll), tag) != std::end(kAll);
}
}  // namespace formula

struct BoundEntry {
  std::string name;
  double value = 0.0;
  std::string formula;
  std::map<std::string, std::string> inputs;
};

class BoundReport {
 public:
  void add(std::string name, double value, std::string_view tag, std::map<std::string, std::string> inputs = {}) {
    if (!std::isfinite(value) || value < 0.0)
      throw Error(ErrorKind::BadParams, "bound '" + name + "' is not a finite nonnegative value");
    if (!formula::known(tag)) throw Error(ErrorKind::BadParams, "unknown formula tag " + std::string(tag));
    entries_.push_back({std::move(name), value, std::string(tag), std::move(inputs)});
  }

  void append(const BoundReport& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
  }

  const BoundEntry* find(std::string_view name) const {
    for (const auto& e : entries_)
      if (e.name == name) return &e;
    return nullptr;
  }

  double value(std::string_view name) const {
    const auto* e = find(name);
    if (!e) throw Error(ErrorKind::BadParams, "no report entry " + std::string(name));
    return e->value;
  }

  const std::vector<BoundEntry>& entries() const { return entries_; }

 private:
  std::vector<BoundEntry> entries_;
};

/// L_{w,e}(x) = E sum_y 1{e in gamma_xy} |gamma_xy|_w mu(y), indexed [e][x].
class PathLoad {
 public:
  PathLoad(std::size_t edges, std::size_t vertices) : n_(vertices), v_(edges * vertices, 0.0) {}
  double operator()(EdgeId e, Vertex x) const { return v_[e * n_ + x]; }
  double& at(EdgeId e, Vertex x) { return v_[e * n_ + x]; }
  std::span<const double> row(EdgeId e) const { return {v_.data() + e * n_, n_}; }
  std::size_t edge_count() const { return n_ ? v_.size() / n_ : 0; }

 private:
  std::size_t n_;
  std::vector<double> v_;
};

inline PathLoad path_load(const ReversibleModel& model, const PathSystem& paths, const LengthFunction& w) {
  PathLoad load(model.edge_count(), model.vertex_count());
  for_each_traversal(model, paths, w, [&](EdgeId e, Vertex x, Vertex y, double, double wlen) {
    load.at(e, x) += wlen * model.mu(y);
  });
  return load;
}

/// Per-edge log-Sobolev term (Ent(L_e) + mu(L_e) log(e^2+1)) / (Q(e) w(e)).
inline std::vector<double> ls_bound_per_edge(const ReversibleModel& model, const PathSystem& paths,
                                             const LengthFunction& w) {
  const PathLoad load = path_load(model, paths, w);
  const double log_c = std::log(std::exp(2.0) + 1.0);
  std::vector<double> out(model.edge_count());
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    const auto row = load.row(e);
    const double ent = std::max(0.0, entropy(model.mu(), row));
    out[e] = (ent + model.mean(row) * log_c) / (model.conductance(e) * w(e));
  }
  return out;
}

/// Upper bound on the log-Sobolev constant for a fixed length function.
inline double ls_bound(const ReversibleModel& model, const PathSystem& paths, const LengthFunction& w) {
  const auto per = ls_bound_per_edge(model, paths, w);
  return *std::max_element(per.begin(), per.end());
}

/// Per-edge values 2/(Q(e) w(e)) sum_x L_{w,e}(x) phi(x) mu(x).
inline std::vector<double> weighted_poincare_per_edge(const ReversibleModel& model, const PathSystem& paths,
                                                      const LengthFunction& w, std::span<const double> phi) {
  if (phi.size() != model.vertex_count()) throw Error(ErrorKind::BadParams, "phi has wrong length");
  for (double v : phi)
    if (v < 0.0) throw Error(ErrorKind::NegativePhi, "phi must be nonnegative");
  std::vector<double> h(model.edge_count(), 0.0);
  for_each_traversal(model, paths, w, [&](EdgeId e, Vertex x, Vertex y, double, double wlen) {
    h[e] += wlen * phi[x] * model.mu(x) * model.mu(y);
  });
  for (EdgeId e = 0; e < model.edge_count(); ++e) h[e] *= 2.0 / (model.conductance(e) * w(e));
  return h;
}

/// c(phi,w) = max_e 2/(Q(e) w(e)) sum_x L_{w,e}(x) phi(x) mu(x).
inline double weighted_poincare(const ReversibleModel& model, const PathSystem& paths, const LengthFunction& w,
                                std::span<const double> phi) {
  const auto h = weighted_poincare_per_edge(model, paths, w, phi);
  return *std::max_element(h.begin(), h.end());
}

/// Per-edge values 1/(Q(e) w(e)) sum_{x,y} E[1{e in gamma} |gamma|_w] mu(x) mu(y).
inline std::vector<double> poincare_per_edge(const ReversibleModel& model, const PathSystem& paths,
                                             const LengthFunction& w) {
  auto h = edge_expectation(model, paths, w, [](Vertex, Vertex) { return 1.0; });
  for (EdgeId e = 0; e < model.edge_count(); ++e) h[e] /= model.conductance(e) * w(e);
  return h;
}

/// Poincare bound for a length function: the max of poincare_per_edge.
inline double poincare_bound(const ReversibleModel& model, const PathSystem& paths, const LengthFunction& w) {
  const auto h = poincare_per_edge(model, paths, w);
  return *std::max_element(h.begin(), h.end());
}

/// The classical form with path lengths measured in 1/Q; equal to the
/// length-function form at w = 1/Q.
inline double poincare_bound(const ReversibleModel& model, const PathSystem& paths) {
  return poincare_bound(model, paths, LengthFunction::inverse_conductance(model));
}

/// Per-edge values of K(w): 1/(Q(e) w(e)) sum_{x,y} E[1{e in gamma} |gamma|_w] rho^2(x,y) mu(x) mu(y).
inline std::vector<double> K_per_edge(const ReversibleModel& model, const PathSystem& paths, const LengthFunction& w,
                                      const Metric& rho) {
  auto h = edge_expectation(model, paths, w, [&](Vertex x, Vertex y) { return rho(x, y) * rho(x, y); });
  for (EdgeId e = 0; e < model.edge_count(); ++e) h[e] /= model.conductance(e) * w(e);
  return h;
}

inline double K_constant(const ReversibleModel& model, const PathSystem& paths, const LengthFunction& w,
                         const Metric& rho) {
  const auto h = K_per_edge(model, paths, w, rho);
  return *std::max_element(h.begin(), h.end());
}

/// Per-edge values (1/Q(e)) sum_{x,y} P[e in gamma_xy] rho(x,y) mu(x) mu(y).
inline std::vector<double> kappa_per_edge(const ReversibleModel& model, const PathSystem& paths, const Metric& rho) {
  auto h = edge_expectation(
      model, paths, LengthFunction::uniform(model), [&](Vertex x, Vertex y) { return rho(x, y); },
      Traversal::Indicator);
  for (EdgeId e = 0; e < model.edge_count(); ++e) h[e] /= model.conductance(e);
  return h;
}

inline double kappa_constant(const ReversibleModel& model, const PathSystem& paths, const Metric& rho) {
  const auto h = kappa_per_edge(model, paths, rho);
  return *std::max_element(h.begin(), h.end());
}

/// Degree/diameter/b bounds for the simple random walk with the graph metric.
inline BoundReport laplacian_corollary_bounds(const ReversibleModel& model) {
  if (!model.is_laplacian()) throw Error(ErrorKind::NotLaplacian, "model is not the simple random walk");
  const auto stats = degree_stats(model);
  const double d = static_cast<double>(stats.d_star);
  const double b = static_cast<double>(b_constant(model));
  const double D = static_cast<double>(diameter(model));
  const double E = static_cast<double>(stats.edge_count);
  std::map<std::string, std::string> inputs{{"metric", "graph"}, {"w", "uniform"}, {"paths", "uniform-geodesic"},
                                            {"d_star", std::to_string(stats.d_star)},
                                            {"b", std::to_string(b_constant(model))},
                                            {"diameter", std::to_string(diameter(model))}};
  BoundReport r;
  r.add("K_laplacian", d * d * b * D * D * D / E, formula::kLaplacianK, inputs);
  r.add("kappa_laplacian", d * d * b * D / E, formula::kLaplacianKappa, inputs);
  return r;
}

/// max over pairs of |g(x) - g(y)| / rho(x,y); zero for constant g.
inline double lipschitz_seminorm(const Metric& rho, std::span<const double> g) {
  double best = 0.0;
  for (Vertex x = 0; x < rho.size(); ++x)
    for (Vertex y = x + 1; y < rho.size(); ++y) {
      const double diff = std::abs(g[x] - g[y]);
      if (diff == 0.0) continue;
      if (rho(x, y) == 0.0) return std::numeric_limits<double>::infinity();
      best = std::max(best, diff / rho(x, y));
    }
  return best;
}

/// M = max_x 1/2 sum_{y~x} rho^2(x,y) q(x,y).
inline double jump_moment(const ReversibleModel& model, const Metric& rho) {
  double best = 0.0;
  for (Vertex x = 0; x < model.vertex_count(); ++x) {
    double s = 0.0;
    for (EdgeId e : model.out_edges(x)) s += rho(x, model.to(e)) * rho(x, model.to(e)) * model.rate(e);
    best = std::max(best, 0.5 * s);
  }
  return best;
}

/// M, the transport-entropy constant sqrt(2KM), and kappa^2 B when kappa is given.
inline BoundReport concentration_constants(const ReversibleModel& model, const Metric& rho, double K,
                                           std::optional<double> kappa = std::nullopt) {
  BoundReport r;
  const std::map<std::string, std::string> inputs{{"metric", std::string(to_string(rho.kind()))}};
  const double M = jump_moment(model, rho);
  r.add("M", M, formula::kTransportEntropyM, inputs);
  r.add("transport_entropy", std::sqrt(2.0 * K * M), formula::kTransportEntropy, inputs);
  if (kappa) {
    const double B = degree_stats(model).max_out_rate;
    r.add("gaussian_from_cheeger", *kappa * *kappa * B, formula::kGaussianFromCheeger, inputs);
  }
  return r;
}

struct MgfCheck {
  bool pass = true;
  double worst_ratio = 0.0;  // max over the grid of lhs / rhs
};

/// Checks mu(exp(lambda (g - mu g))) <= exp(lambda^2 te ||g||_Lip^2 / 4) on a grid.
inline MgfCheck mgf_check(const ReversibleModel& model, const Metric& rho, std::span<const double> g,
                          std::span<const double> lambdas, double te_constant, double slack = 1e-12) {
  const double mg = model.mean(g);
  const double lip = lipschitz_seminorm(rho, g);
  MgfCheck out;
  for (double lambda : lambdas) {
    double lhs = 0.0;
    for (Vertex x = 0; x < model.vertex_count(); ++x) lhs += model.mu(x) * std::exp(lambda * (g[x] - mg));
    const double rhs = lip == 0.0 ? 1.0 : std::exp(lambda * lambda * te_constant * lip * lip / 4.0);
    const double ratio = lhs / rhs;
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    if (lhs > rhs * (1.0 + slack)) out.pass = false;
  }
  return out;
}

}  // namespace pathineq
