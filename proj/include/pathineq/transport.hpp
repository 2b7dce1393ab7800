#pragma once

// Exact Wasserstein-1 distance on a finite metric space by the
// transportation simplex (stepping-stone / u-v method).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pathineq/error.hpp"
#include "pathineq/metric_paths.hpp"

namespace pathineq {

/// Nonnegative weights over the vertices summing to one within 1e-12.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  explicit ProbabilityVector(std::vector<double> p) : p_(std::move(p)) {
    double s = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::BadInput, "probability entries must be finite and >= 0");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) throw Error(ErrorKind::BadInput, "probability vector sums to " + std::to_string(s));
  }

  /// Divides by the total mass.
  static ProbabilityVector normalized(std::vector<double> w) {
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(s > 0.0)) throw Error(ErrorKind::BadInput, "cannot normalize a vector with no mass");
    for (double& v : w) v /= s;
    return ProbabilityVector(std::move(w));
  }

  static ProbabilityVector point_mass(std::size_t n, std::size_t x) {
    std::vector<double> p(n, 0.0);
    p.at(x) = 1.0;
    return ProbabilityVector(std::move(p));
  }

  double operator[](std::size_t x) const { return p_[x]; }
  std::size_t size() const { return p_.size(); }
  std::span<const double> values() const { return p_; }

 private:
  std::vector<double> p_;
};

struct TransportPlan {
  std::size_t n = 0;
  std::vector<double> mass;  // n x n, row = first marginal

  double operator()(std::size_t i, std::size_t j) const { return mass[i * n + j]; }
  double row_sum(std::size_t i) const {
    return std::accumulate(mass.begin() + static_cast<std::ptrdiff_t>(i * n),
                           mass.begin() + static_cast<std::ptrdiff_t>((i + 1) * n), 0.0);
  }
  double col_sum(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += mass[i * n + j];
    return s;
  }
};

struct TransportResult {
  double value = 0.0;
  TransportPlan plan;
  std::vector<double> witness;  // 1-Lipschitz g with nu1(g) - nu2(g) = value
  double dual_value = 0.0;
  std::size_t pivots = 0;

  double gap() const { return std::abs(value - dual_value); }
};

inline constexpr std::size_t kMaxTransportPivots = 100000;

namespace detail {

class TransportSimplex {
 public:
  TransportSimplex(const Metric& cost, std::span<const double> supply, std::span<const double> demand)
      : n_(cost.size()), cost_(cost), flow_(n_ * n_, 0.0), basic_(n_ * n_, 0), u_(n_), v_(n_) {
    northwest_corner(supply, demand);
  }

  std::size_t solve() {
    double scale = 0.0;
    for (double c : cost_.matrix()) scale = std::max(scale, c);
    const double eps = 1e-13 * std::max(scale, 1.0);
    std::size_t pivots = 0;
    for (;;) {
      potentials();
      std::size_t entering = kNone;
      // Bland: lowest-index improving cell.
      for (std::size_t c = 0; c < n_ * n_ && entering == kNone; ++c)
        if (!basic_[c] && cost_(c / n_, c % n_) - u_[c / n_] - v_[c % n_] < -eps) entering = c;
      if (entering == kNone) return pivots;
      if (++pivots > kMaxTransportPivots) throw Error(ErrorKind::NonConvergence, "transport pivot limit exceeded");
      pivot(entering);
    }
  }

  double flow(std::size_t i, std::size_t j) const { return flow_[i * n_ + j]; }
  double col_potential(std::size_t j) const { return v_[j]; }
  double row_potential(std::size_t i) const { return u_[i]; }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  void northwest_corner(std::span<const double> supply, std::span<const double> demand) {
    std::vector<double> ra(supply.begin(), supply.end()), rb(demand.begin(), demand.end());
    std::size_t i = 0, j = 0;
    for (;;) {
      const double x = std::min(ra[i], rb[j]);
      const std::size_t c = i * n_ + j;
      basic_[c] = 1;
      flow_[c] = x;
      ra[i] -= x;
      rb[j] -= x;
      if (i + 1 == n_ && j + 1 == n_) break;
      if (i + 1 == n_) ++j;
      else if (j + 1 == n_) ++i;
      else if (ra[i] <= rb[j]) ++i;
      else ++j;
    }
  }

  // Basis cells form a spanning tree on rows 0..n-1 and columns n..2n-1.
  void neighbours(std::vector<std::vector<std::size_t>>& adj) const {
    adj.assign(2 * n_, {});
    for (std::size_t c = 0; c < n_ * n_; ++c)
      if (basic_[c]) {
        adj[c / n_].push_back(c);
        adj[n_ + c % n_].push_back(c);
      }
  }

  void potentials() {
    neighbours(adj_);
    std::vector<char> done(2 * n_, 0);
    std::vector<std::size_t> stack{0};
    u_[0] = 0.0;
    done[0] = 1;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t c : adj_[node]) {
        const std::size_t i = c / n_, j = c % n_;
        const std::size_t other = node < n_ ? n_ + j : i;
        if (done[other]) continue;
        done[other] = 1;
        if (other >= n_) v_[j] = cost_(i, j) - u_[i];
        else u_[i] = cost_(i, j) - v_[j];
        stack.push_back(other);
      }
    }
  }

  void pivot(std::size_t entering) {
    // Tree path from the entering row to the entering column.
    const std::size_t start = entering / n_, goal = n_ + entering % n_;
    std::vector<std::size_t> via(2 * n_, kNone);
    std::vector<char> seen(2 * n_, 0);
    std::vector<std::size_t> queue{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < queue.size() && !seen[goal]; ++head) {
      const std::size_t node = queue[head];
      for (std::size_t c : adj_[node]) {
        const std::size_t other = node < n_ ? n_ + c % n_ : c / n_;
        if (seen[other]) continue;
        seen[other] = 1;
        via[other] = c;
        queue.push_back(other);
      }
    }
    std::vector<std::size_t> path;  // cells from goal back to start
    for (std::size_t node = goal; node != start;) {
      const std::size_t c = via[node];
      path.push_back(c);
      node = node < n_ ? n_ + c % n_ : c / n_;
    }
    // Cells at even positions from the goal side lose mass.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = kNone;
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const std::size_t c = path[k];
      if (flow_[c] < theta || (flow_[c] == theta && c < leaving)) {
        theta = flow_[c];
        leaving = c;
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      const std::size_t c = path[k];
      flow_[c] = k % 2 == 0 ? flow_[c] - theta : flow_[c] + theta;
    }
    flow_[entering] = theta;
    flow_[leaving] = 0.0;
    basic_[entering] = 1;
    basic_[leaving] = 0;
  }

  std::size_t n_;
  const Metric& cost_;
  std::vector<double> flow_;
  std::vector<char> basic_;
  std::vector<double> u_, v_;
  std::vector<std::vector<std::size_t>> adj_;
};

}  // namespace detail

/// Exact W1 between nu1 and nu2 with the optimal plan and a 1-Lipschitz dual
/// witness built as the c-transform of the column potentials.
inline TransportResult wasserstein1(const Metric& rho, const ProbabilityVector& nu1, const ProbabilityVector& nu2) {
  const std::size_t n = rho.size();
  if (nu1.size() != n || nu2.size() != n)
    throw Error(ErrorKind::BadInput, "measure length does not match the metric (" + std::to_string(nu1.size()) + ", " +
                                         std::to_string(nu2.size()) + " vs " + std::to_string(n) + ")");
  TransportResult out;
  out.plan.n = n;
  out.plan.mass.assign(n * n, 0.0);
  out.witness.assign(n, 0.0);
  if (n == 0) return out;

  detail::TransportSimplex simplex(rho, nu1.values(), nu2.values());
  out.pivots = simplex.solve();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      out.plan.mass[i * n + j] = simplex.flow(i, j);
      out.value += simplex.flow(i, j) * rho(i, j);
    }
  for (std::size_t x = 0; x < n; ++x) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) g = std::min(g, rho(x, j) - simplex.col_potential(j));
    out.witness[x] = g;
  }
  for (std::size_t x = 0; x < n; ++x) out.dual_value += (nu1[x] - nu2[x]) * out.witness[x];
  return out;
}

}  // namespace pathineq
