#pragma once

// Desk-scale ground truth: spectral gap, entropy and information, brute-force
// Cheeger ratios, a numeric log-Sobolev lower estimate and the asymptotic
// variance of time averages.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "pathineq/error.hpp"
#include "pathineq/functionals.hpp"
#include "pathineq/graph_core.hpp"
#include "pathineq/metric_paths.hpp"
#include "pathineq/rng.hpp"
#include "pathineq/transport.hpp"

namespace pathineq {

inline double dirichlet(const ReversibleModel& model, std::span<const double> f) { return dirichlet_form(model, f); }
inline double dirichlet(const ReversibleModel& model, std::span<const double> f, std::span<const double> g) {
  return dirichlet_form(model, f, g);
}

// ---------------------------------------------------------------------------
// Spectrum

struct SymmetricEigen {
  std::size_t n = 0;
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column k (stride n) belongs to values[k]
  double vector(std::size_t row, std::size_t k) const { return vectors[row * n + k]; }
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// 1e-12 times the matrix norm.
inline SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  double norm = 0.0;
  for (double x : a) norm += x * x;
  norm = std::sqrt(norm);
  const double target = 1e-12 * std::max(norm, std::numeric_limits<double>::min());
  auto off = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a[i * n + j] * a[i * n + j];
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < 100 && off() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
  }
  if (off() > target) throw Error(ErrorKind::NonConvergence, "Jacobi iteration did not converge");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i * n + i] < a[j * n + j]; });
  SymmetricEigen out;
  out.n = n;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a[order[k] * n + order[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors[r * n + k] = v[r * n + order[k]];
  }
  return out;
}

struct SpectralGap {
  double gap = 0.0;                  // smallest nonzero eigenvalue of -L
  double cp = 0.0;                   // 1 / gap
  std::vector<double> eigenfunction; // mean zero, mu(f^2) = 1
  std::vector<double> spectrum;
};

/// Full spectrum of -L via its symmetrization in L2(mu).
inline SpectralGap spectral_gap(const ReversibleModel& model) {
  const std::size_t n = model.vertex_count();
  if (n < 2) throw Error(ErrorKind::DegenerateSpectrum, "need at least two vertices");
  std::vector<double> s(n * n, 0.0);
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    const Vertex x = model.from(e), y = model.to(e);
    s[x * n + x] += model.rate(e);
    s[x * n + y] = -model.conductance(e) / std::sqrt(model.mu(x) * model.mu(y));
  }
  const auto eig = jacobi_eigen(std::move(s), n);
  const double scale = std::max(1.0, std::abs(eig.values.back()));
  if (std::abs(eig.values[0]) > 1e-10 * scale)
    throw Error(ErrorKind::DegenerateSpectrum, "lowest eigenvalue is not zero");
  if (eig.values[1] <= 1e-10 * scale)
    throw Error(ErrorKind::DegenerateSpectrum, "eigenvalue zero is not simple");
  SpectralGap out;
  out.gap = eig.values[1];
  out.cp = 1.0 / out.gap;
  out.spectrum = eig.values;
  out.eigenfunction.resize(n);
  double norm = 0.0;
  for (Vertex x = 0; x < n; ++x) {
    out.eigenfunction[x] = eig.vector(x, 1) / std::sqrt(model.mu(x));
    norm += model.mu(x) * out.eigenfunction[x] * out.eigenfunction[x];
  }
  for (double& f : out.eigenfunction) f /= std::sqrt(norm);
  return out;
}

/// Poincare constant 1 / lambda_1.
inline double spectral_cp(const ReversibleModel& model) { return spectral_gap(model).cp; }

// ---------------------------------------------------------------------------
// Entropy and information

struct EntropyInfo {
  double entropy = 0.0;      // H(nu | mu)
  double information = 0.0;  // I(nu | mu)
};

inline EntropyInfo entropy_info(const ReversibleModel& model, const ProbabilityVector& nu) {
  if (nu.size() != model.vertex_count()) throw Error(ErrorKind::BadInput, "measure has wrong length");
  EntropyInfo out;
  std::vector<double> h(nu.size());
  for (Vertex x = 0; x < nu.size(); ++x) {
    if (nu[x] > 0.0) out.entropy += nu[x] * std::log(nu[x] / model.mu(x));
    h[x] = std::sqrt(nu[x] / model.mu(x));
  }
  out.information = dirichlet_form(model, h);
  return out;
}

/// || d nu / d mu ||_{L2(mu)}.
inline double density_l2_norm(const ReversibleModel& model, const ProbabilityVector& nu) {
  double s = 0.0;
  for (Vertex x = 0; x < nu.size(); ++x) s += nu[x] * nu[x] / model.mu(x);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Generalized Cheeger constant: brute force over indicator densities

struct CheegerLower {
  double value = 0.0;
  std::uint64_t best_subset = 0;  // bit x set when x in A
};

inline constexpr std::size_t kMaxCheegerVertices = 20;

/// 2 W1(f mu, mu) / sum_e |D_e f| Q(e) for the density f = 1_A / mu(A).
inline double cheeger_ratio(const ReversibleModel& model, const Metric& rho, std::uint64_t subset) {
  const std::size_t n = model.vertex_count();
  double mass = 0.0;
  for (Vertex x = 0; x < n; ++x)
    if (subset >> x & 1U) mass += model.mu(x);
  std::vector<double> nu(n, 0.0);
  for (Vertex x = 0; x < n; ++x)
    if (subset >> x & 1U) nu[x] = model.mu(x) / mass;
  double boundary = 0.0;
  for (EdgeId e = 0; e < model.edge_count(); ++e)
    if ((subset >> model.from(e) & 1U) != (subset >> model.to(e) & 1U)) boundary += model.conductance(e);
  const double tv_gradient = boundary / mass;
  std::vector<double> mu(model.mu().begin(), model.mu().end());
  // Renormalize against rounding so the vectors pass the 1e-12 sum check.
  const auto w = wasserstein1(rho, ProbabilityVector::normalized(std::move(nu)), ProbabilityVector::normalized(std::move(mu)));
  return 2.0 * w.value / tv_gradient;
}

/// A lower bound on the generalized Cheeger constant; every nonempty proper
/// subset is a witness, singletons 1_x / mu(x) included.
inline CheegerLower cheeger_lower(const ReversibleModel& model, const Metric& rho) {
  const std::size_t n = model.vertex_count();
  if (n > kMaxCheegerVertices) throw Error(ErrorKind::TooLarge, "subset enumeration limited to 20 vertices");
  if (rho.size() != n) throw Error(ErrorKind::BadInput, "metric size does not match the model");
  CheegerLower out;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t a = 1; a < full; ++a) {
    const double r = cheeger_ratio(model, rho, a);
    if (r > out.value) {
      out.value = r;
      out.best_subset = a;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Log-Sobolev lower estimate

/// Ent(f^2) / (2 E(f,f)); zero when f is constant.
inline double log_sobolev_ratio(const ReversibleModel& model, std::span<const double> f) {
  const double ef = dirichlet_form(model, f);
  if (ef <= 0.0) return 0.0;
  return entropy_of_square(model, f) / (2.0 * ef);
}

/// Analytic gradient of log_sobolev_ratio.
inline std::vector<double> log_sobolev_gradient(const ReversibleModel& model, std::span<const double> f) {
  const std::size_t n = model.vertex_count();
  const double ent = entropy_of_square(model, f);
  const double ef = dirichlet_form(model, f);
  double m = 0.0;
  for (Vertex x = 0; x < n; ++x) m += model.mu(x) * f[x] * f[x];
  const double log_m = std::log(m);
  std::vector<double> d_ent(n), d_e(n, 0.0), grad(n);
  for (Vertex x = 0; x < n; ++x)
    d_ent[x] = f[x] == 0.0 ? 0.0 : 2.0 * model.mu(x) * f[x] * (std::log(f[x] * f[x]) - log_m);
  // Each non-oriented edge appears twice among the oriented edges.
  for (EdgeId e = 0; e < model.edge_count(); ++e)
    d_e[model.from(e)] += 2.0 * (f[model.from(e)] - f[model.to(e)]) * model.conductance(e);
  for (Vertex x = 0; x < n; ++x) grad[x] = (d_ent[x] * ef - ent * d_e[x]) / (2.0 * ef * ef);
  return grad;
}

struct LsLower {
  double value = 0.0;
  std::vector<double> witness;
  double eigenfunction_ratio = 0.0;  // ratio at the spectral-gap eigenfunction start
};

namespace detail {

inline void normalize_l2(const ReversibleModel& model, std::vector<double>& f) {
  double m = 0.0;
  for (Vertex x = 0; x < f.size(); ++x) m += model.mu(x) * f[x] * f[x];
  if (m <= 0.0) return;
  const double s = 1.0 / std::sqrt(m);
  for (double& v : f) v *= s;
}

inline double ascend(const ReversibleModel& model, std::vector<double>& f, std::size_t iterations) {
  normalize_l2(model, f);
  double value = log_sobolev_ratio(model, f);
  double step = 1e-2;
  std::vector<double> trial(f.size());
  for (std::size_t it = 0; it < iterations && step > 1e-16; ++it) {
    const auto grad = log_sobolev_gradient(model, f);
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    if (!(gnorm > 0.0) || !std::isfinite(gnorm)) break;
    gnorm = std::sqrt(gnorm);
    for (;;) {
      for (std::size_t x = 0; x < f.size(); ++x) trial[x] = f[x] + step * grad[x] / gnorm;
      normalize_l2(model, trial);
      const double cand = log_sobolev_ratio(model, trial);
      if (std::isfinite(cand) && cand > value) {
        f = trial;
        value = cand;
        step *= 2.0;
        break;
      }
      step *= 0.5;
      if (step <= 1e-16) break;
    }
  }
  return value;
}

}  // namespace detail

/// Heuristic lower estimate of the log-Sobolev constant by gradient ascent on
/// Ent(f^2)/(2E(f,f)). Any f certifies its ratio, so the result is a lower
/// bound; the maximizing f is returned as a witness.
inline LsLower ls_lower(const ReversibleModel& model, std::size_t restarts, std::size_t iterations,
                        std::uint64_t seed = 1) {
  if (restarts < 1) throw Error(ErrorKind::BadParams, "ls_lower needs at least one restart");
  const std::size_t n = model.vertex_count();
  const auto eig = spectral_gap(model);
  std::vector<std::vector<double>> starts;
  starts.push_back(eig.eigenfunction);
  for (double eps : {0.5, 0.1, 0.01}) {
    std::vector<double> f(n);
    for (Vertex x = 0; x < n; ++x) f[x] = 1.0 + eps * eig.eigenfunction[x];
    starts.push_back(std::move(f));
  }
  for (Vertex x = 0; x < n; ++x) {
    std::vector<double> f(n, 0.0);
    f[x] = 1.0;
    starts.push_back(std::move(f));
  }
  for (std::size_t r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(r)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> f(n);
    for (double& v : f) v = unit(rng);
    starts.push_back(std::move(f));
  }

  LsLower out;
  out.eigenfunction_ratio = log_sobolev_ratio(model, eig.eigenfunction);
  for (auto& f : starts) {
    const double start_value = log_sobolev_ratio(model, f);
    if (start_value > out.value) {
      out.value = start_value;
      out.witness = f;
    }
    const double v = detail::ascend(model, f, iterations);
    if (v > out.value) {
      out.value = v;
      out.witness = f;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Asymptotic variance

/// sigma^2(h) = 2 <u, h - mu(h)>_mu where -L u = h - mu(h), mu(u) = 0. Solved
/// as (-L + 1 mu^T) u = h - mu(h), which is nonsingular on a connected graph.
inline double asymptotic_variance(const ReversibleModel& model, std::span<const double> h) {
  const std::size_t n = model.vertex_count();
  if (h.size() != n) throw Error(ErrorKind::BadInput, "observable has wrong length");
  const double mh = model.mean(h);
  std::vector<double> a(n * n, 0.0), rhs(n);
  for (Vertex x = 0; x < n; ++x) {
    rhs[x] = h[x] - mh;
    for (Vertex y = 0; y < n; ++y) a[x * n + y] = model.mu(y);
  }
  for (EdgeId e = 0; e < model.edge_count(); ++e) {
    a[model.from(e) * n + model.from(e)] += model.rate(e);
    a[model.from(e) * n + model.to(e)] -= model.rate(e);
  }
  std::vector<double> centred = rhs;
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (std::abs(a[piv * n + col]) <= 1e-13 * scale) throw Error(ErrorKind::SingularSystem, "generator system is singular");
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[piv * n + k], a[col * n + k]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= factor * a[col * n + k];
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<double> u(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = rhs[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * u[k];
    u[r] = s / a[r * n + r];
  }
  double out = 0.0;
  for (Vertex x = 0; x < n; ++x) out += model.mu(x) * u[x] * centred[x];
  return 2.0 * out;
}

}  // namespace pathineq
