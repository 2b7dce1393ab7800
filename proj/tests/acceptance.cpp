// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed here and never adjusted at run time.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace pathineq;
using namespace testing_support;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(17);
    s << what << ": got " << got << " want " << want << " tol " << tol;
    expect(std::abs(got - want) <= tol, s.str());
  }
  void at_most(double got, double limit, const std::string& what) {
    std::ostringstream s;
    s.precision(17);
    s << what << ": " << got << " > " << limit;
    expect(got <= limit, s.str());
  }
};

const double kLogC = std::log(std::exp(2.0) + 1.0);

double pair_moment_sq(const ReversibleModel& m) {
  const GeodesicTable t(m, LengthFunction::uniform(m));
  return pair_moment(m, t, 2);
}

std::vector<double> indicator(std::size_t n, Vertex v, double scale = 1.0) {
  std::vector<double> f(n, 0.0);
  f[v] = scale;
  return f;
}

// 1. Complete graphs.
void complete_graphs(Check& c, std::string& note) {
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto m = complete_graph(n);
    const auto paths = PathSystem::uniform_geodesic(m);
    const auto w = LengthFunction::uniform(m);
    const auto rho = graph_metric(m);
    const double target = (n - 1.0) / n;
    const std::string tag = "n=" + std::to_string(n) + " ";
    c.near(spectral_cp(m), target, 1e-10, tag + "spectral_cp");
    c.near(K_constant(m, paths, w, rho), target, 1e-12, tag + "K");
    const double kappa = kappa_constant(m, paths, rho);
    c.near(kappa, target, 1e-12, tag + "kappa");
    c.near(cheeger_lower(m, rho).value, kappa, 1e-10, tag + "cheeger_lower");
    c.near(ls_bound(m, paths, w), (1.0 - 1.0 / n) * (std::log(static_cast<double>(n)) + kLogC), 1e-12, tag + "ls_bound");
  }
  note = "n=2..8";
}

// 2. Star graphs.
void star_graphs(Check& c, std::string& note) {
  double worst_ratio = 1e300;
  for (std::size_t n = 3; n <= 10; ++n) {
    const auto m = star_graph(n);
    const auto paths = PathSystem::tree_unique(m);
    const auto w = LengthFunction::uniform(m);
    const auto rho = graph_metric(m);
    const auto N = static_cast<double>(n);
    const std::string tag = "n=" + std::to_string(n) + " ";
    c.near(spectral_cp(m), 1.0, 1e-10, tag + "spectral_cp");
    c.near(kappa_constant(m, paths, rho), 1.5 - 1.0 / N, 1e-12, tag + "kappa");
    const Vertex v1 = *m.index_of("v1");
    const auto f = indicator(m.vertex_count(), v1, 2.0 * N);
    std::vector<double> fmu(m.vertex_count());
    for (Vertex x = 0; x < m.vertex_count(); ++x) fmu[x] = f[x] * m.mu(x);
    const auto w1 = wasserstein1(rho, ProbabilityVector::normalized(fmu),
                                 ProbabilityVector::normalized({m.mu().begin(), m.mu().end()}));
    c.near(w1.value, 1.5 - 1.0 / N, 1e-10, tag + "W1(f mu, mu)");
    c.near(total_variation_gradient(m, f), 2.0, 1e-12, tag + "sum |D f| Q");
    c.at_most(K_constant(m, paths, w, rho), 4.5 - 4.0 / N + 1e-9, tag + "K");
    const double closed = (1.5 - 1.0 / N) * std::log(2.0 * N * (std::exp(2.0) + 1.0));
    const double ls = ls_bound(m, paths, w);
    c.at_most(ls, closed + 1e-9, tag + "ls_bound");
    const double ratio = ls / closed;
    worst_ratio = std::min(worst_ratio, ratio);
    c.expect(ratio >= 0.5, tag + "ls_bound / closed form below 0.5");
    const auto lower = ls_lower(m, 4, 400, 7);
    c.expect(lower.value >= std::log(2.0 * N) / 2.0 - 1e-9, tag + "ls_lower below log(2n)/2");
  }
  std::ostringstream s;
  s << "n=3..10, min ls_bound/closed-form ratio " << worst_ratio;
  note = s.str();
}

double circle_upper(std::size_t p) {
  const double P = static_cast<double>(p);
  const double base = std::log(3.0 * (std::exp(2.0) + 1.0)) / 12.0 * (P + 1.0) * (P + 2.0);
  return p % 2 == 0 ? base : base * (1.0 + 3.0 / P);
}

// 3. Cycles.
void cycles(Check& c, std::string& note) {
  std::vector<std::size_t> flagged;
  for (std::size_t p = 3; p <= 12; ++p) {
    const auto m = cycle_graph(p);
    const auto paths = PathSystem::uniform_geodesic(m);
    const auto w = LengthFunction::uniform(m);
    const auto rho = graph_metric(m);
    const std::string tag = "p=" + std::to_string(p) + " ";
    c.near(spectral_cp(m), 1.0 / (1.0 - std::cos(2.0 * std::numbers::pi / static_cast<double>(p))), 1e-9,
           tag + "spectral_cp");
    const double ls = ls_bound(m, paths, w);
    const double closed = circle_upper(p);
    c.at_most(ls, closed * 1.05, tag + "ls_bound vs circle closed form");
    if (ls > closed + 1e-9) flagged.push_back(p);
    // Exact kappa against the edge-transitive bound.
    const double kappa = kappa_constant(m, paths, rho);
    double exact = 0.0;  // E[rho_1^2] summed over distances directly
    for (std::size_t k = 0; k < p; ++k) {
      const double d = static_cast<double>(std::min(k, p - k));
      exact += d * d / static_cast<double>(p);
    }
    const double moment = pair_moment_sq(m);
    c.near(moment, exact, 1e-12, tag + "E[rho^2]");
    c.at_most(kappa, moment + 1e-12, tag + "kappa vs E[rho^2]");
    if (p == 12) c.at_most(moment, 144.0 / 12.0 + 12.0, tag + "E[rho^2] at p=12");
  }
  std::ostringstream s;
  s << "p=3..12";
  if (!flagged.empty()) {
    s << "; INSPECT antipodal tie-break, ls_bound above closed form at p =";
    for (auto p : flagged) s << ' ' << p;
  }
  note = s.str();
}

// 4. Binary trees.
void binary_trees(Check& c, std::string& note) {
  for (std::size_t d = 2; d <= 5; ++d) {
    const auto m = binary_tree(d);
    const auto paths = PathSystem::tree_unique(m);
    const auto w = LengthFunction::uniform(m);
    const auto rho = graph_metric(m);
    const double two_d = std::pow(2.0, static_cast<double>(d));
    const std::string tag = "d=" + std::to_string(d) + " ";
    const std::uint64_t b_expected = ((std::uint64_t{1} << d) - 1) << d;
    c.expect(b_constant(m) == b_expected, tag + "b_constant = " + std::to_string(b_constant(m)) + " expected " +
                                              std::to_string(b_expected));
    c.near(kappa_constant(m, paths, rho), (2.0 * d - 3.0) * two_d + 3.0, 1e-9, tag + "kappa");
    const double K = K_constant(m, paths, w, rho);
    c.at_most(K, 18.0 * two_d * std::pow(static_cast<double>(d), 3.0), tag + "K vs 18 2^d d^3");
    const auto cor = laplacian_corollary_bounds(m);
    c.expect(cor.value("K_laplacian") >= K, tag + "degree/geodesic K entry below computed K");
  }
  note = "d=2..5";
}

// 5. Birth-death sharpness of the length-function Poincare bound.
void birth_death_sharpness(Check& c, std::string& note) {
  std::mt19937_64 rng(20240501);
  double worst = 0.0;
  std::size_t models = 0;
  OptimizeConfig config;
  config.restarts = 2;
  config.seed = 5;
  for (std::size_t n = 3; n <= 8; ++n)
    for (int trial = 0; trial < 20; ++trial) {
      const auto m = random_birth_death(rng, n);
      const auto paths = PathSystem::tree_unique(m);
      const auto res = optimize_w(m, paths, Objective::poincare(), config);
      const double cp = spectral_cp(m);
      const double rel = res.value_best / cp - 1.0;
      worst = std::max(worst, rel);
      ++models;
      std::ostringstream s;
      s << "n=" << n << " trial " << trial << " relative excess " << rel;
      c.at_most(rel, 0.05, s.str());
      c.expect(res.value_best >= cp * (1.0 - 1e-9), "optimized bound below c_P: " + s.str());
    }
  std::ostringstream s;
  s << models << " models, worst relative excess over c_P " << worst;
  note = s.str();
}

// 6. Transport oracle.
void transport_oracle(Check& c, std::string& note) {
  std::mt19937_64 rng(77);
  double worst_gap = 0.0, worst_tv = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const auto m = random_model(rng, n, 0.3);
    const auto rho = all_pairs_distance(m, random_lengths(rng, m));
    const auto nu1 = random_probability(rng, n), nu2 = random_probability(rng, n);
    const auto res = wasserstein1(rho, nu1, nu2);
    worst_gap = std::max(worst_gap, res.gap());
    c.expect(res.gap() < 1e-8, "instance " + std::to_string(i) + " primal-dual gap");
    const auto tv = wasserstein1(Metric::discrete(n), nu1, nu2);
    double half_l1 = 0.0;
    for (std::size_t x = 0; x < n; ++x) half_l1 += 0.5 * std::abs(nu1[x] - nu2[x]);
    worst_tv = std::max(worst_tv, std::abs(tv.value - half_l1));
    c.near(tv.value, half_l1, 1e-12, "instance " + std::to_string(i) + " discrete metric");
  }
  std::ostringstream s;
  s << "100 instances, max gap " << worst_gap << ", max |W1 - TV| " << worst_tv;
  note = s.str();
}

// 7. Inequality property suite.
void inequality_suite(Check& c, std::string& note) {
  std::mt19937_64 rng(4242);
  const double slack = 1e-9;
  std::size_t checks = 0;
  auto le = [&](double lhs, double rhs, const std::string& what) {
    ++checks;
    c.at_most(lhs - rhs, slack * std::max(1.0, std::abs(rhs)), what);
  };
  for (int mi = 0; mi < 20; ++mi) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const auto m = random_model(rng, n, 0.35);
    const auto paths = PathSystem::uniform_geodesic(m);
    const auto w = random_lengths(rng, m);
    const auto rho = graph_metric(m);
    const auto disc = Metric::discrete(n);
    const double cp_bound = poincare_bound(m, paths, w);
    const double cp10 = poincare_bound(m, paths);
    const double ls = ls_bound(m, paths, w);
    const double K = K_constant(m, paths, w, rho);
    const double kappa = kappa_constant(m, paths, rho);
    const double kappa_disc = kappa_constant(m, paths, disc);
    // The median form uses the phi = 1 metric 1{x != y}(1 + 1), twice the discrete one.
    const double kappa_two = kappa_constant(m, paths, Metric::weighted_discrete(std::vector<double>(n, 1.0)));
    const double te = std::sqrt(2.0 * K * jump_moment(m, rho));
    const std::string tag = "model " + std::to_string(mi) + " ";

    // (h) over all subsets, once per model.
    for (std::uint64_t a = 1; a + 1 < (std::uint64_t{1} << n); ++a) {
      double ma = 0.0, boundary = 0.0;
      for (Vertex x = 0; x < n; ++x)
        if (a >> x & 1U) ma += m.mu(x);
      for (EdgeId e = 0; e < m.edge_count(); ++e)
        if ((a >> m.from(e) & 1U) != (a >> m.to(e) & 1U)) boundary += m.conductance(e);
      le(2.0 * ma * (1.0 - ma), kappa_disc * boundary, tag + "(h)");
    }

    for (int t = 0; t < 200; ++t) {
      const auto f = random_vector(rng, n, -2.0, 2.0);
      const auto phi = random_vector(rng, n, 0.0, 2.0);
      const double ef = dirichlet_form(m, f);
      const std::string tt = tag + "trial " + std::to_string(t) + " ";
      // (a)
      le(variance(m, f), cp_bound * ef, tt + "(a) length-function Poincare bound");
      le(variance(m, f), cp10 * ef, tt + "(a) inverse-conductance Poincare bound");
      // (b)
      const double cphi = weighted_poincare(m, paths, w, phi);
      double lhs_b = 0.0;
      const double mf = m.mean(f);
      for (Vertex x = 0; x < n; ++x) lhs_b += (f[x] - mf) * (f[x] - mf) * phi[x] * m.mu(x);
      le(lhs_b, cphi * ef, tt + "(b)");
      // (c)
      le(entropy_of_square(m, f), 2.0 * ls * ef, tt + "(c)");
      // (d), (i)
      const auto nu = random_probability(rng, n);
      const ProbabilityVector mu = ProbabilityVector::normalized({m.mu().begin(), m.mu().end()});
      const double w1 = wasserstein1(rho, nu, mu).value;
      const auto info = entropy_info(m, nu);
      le(w1 * w1, 2.0 * K * info.information, tt + "(d)");
      le(w1 * w1, te * info.entropy, tt + "(i)");
      // (e): density from a positive f
      auto pos = random_vector(rng, n, 0.0, 3.0);
      const double mp = m.mean(pos);
      for (double& v : pos) v /= mp;
      std::vector<double> fmu(n);
      for (Vertex x = 0; x < n; ++x) fmu[x] = pos[x] * m.mu(x);
      const double w1f = wasserstein1(rho, ProbabilityVector::normalized(fmu), mu).value;
      le(w1f, kappa / 2.0 * total_variation_gradient(m, pos), tt + "(e)");
      // (f)
      const auto rho_phi = Metric::weighted_discrete(phi);
      const double kappa_phi = kappa_constant(m, paths, rho_phi);
      double lhs_f = 0.0;
      for (Vertex x = 0; x < n; ++x) lhs_f += std::abs(f[x] - mf) * phi[x] * m.mu(x);
      le(lhs_f, kappa_phi / 2.0 * total_variation_gradient(m, f), tt + "(f)");
      // (g)
      const double med = median(m, f);
      double lhs_g = 0.0;
      for (Vertex x = 0; x < n; ++x) lhs_g += std::abs(f[x] - med) * m.mu(x);
      le(lhs_g, kappa_two / 2.0 * total_variation_gradient(m, f), tt + "(g)");
      // Entropy shift and variational lemmas.
      const double a = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
      std::vector<double> fa(n);
      for (Vertex x = 0; x < n; ++x) fa[x] = f[x] - a;
      double mfa2 = 0.0;
      for (Vertex x = 0; x < n; ++x) mfa2 += fa[x] * fa[x] * m.mu(x);
      le(entropy_of_square(m, f), entropy_of_square(m, fa) + 2.0 * mfa2, tt + "entropy shift lemma");
      double mf2phi = 0.0, mf2 = 0.0, mexp = 0.0;
      for (Vertex x = 0; x < n; ++x) {
        mf2phi += f[x] * f[x] * phi[x] * m.mu(x);
        mf2 += f[x] * f[x] * m.mu(x);
        mexp += std::exp(phi[x]) * m.mu(x);
      }
      le(mf2phi - mf2 * std::log(mexp), entropy_of_square(m, f), tt + "variational lemma");
    }
  }
  note = std::to_string(checks) + " inequality checks on 20 models";
}

// 8. Johnson graph J(5,2).
void johnson(Check& c, std::string& note) {
  const auto m = johnson_graph(5, 2);
  c.near(johnson_kappa_formula(5, 2), 1.8, 1e-12, "formula");
  const double kappa = kappa_constant(m, PathSystem::uniform_geodesic(m), graph_metric(m));
  c.at_most(kappa, 1.8 + 1e-9, "computed kappa");
  const auto orbits = edge_orbits(m);
  c.expect(orbits.distance_transitive, "J(5,2) not detected as distance-transitive");
  const auto sym = symmetry_bounds(m, SymmetryClass::verified(orbits));
  c.near(sym.value("kappa_distance_transitive"), 1.8, 1e-12, "distance-transitive entry");
  std::ostringstream s;
  s << "kappa " << kappa << " <= 1.8";
  note = s.str();
}

// 9. Asymptotic variance.
void asymptotic(Check& c, std::string& note) {
  RateGraph g;
  g.vertices = {"a", "b"};
  g.add_edge(0, 1, 1.0, 1.0);
  const auto two = build_model(g);
  const std::vector<double> h{1.0, -1.0};
  c.near(asymptotic_variance(two, h), 1.0, 1e-12, "two-point");
  const std::vector<std::pair<std::string, ReversibleModel>> models = {
      {"complete(3)", complete_graph(3)}, {"cycle(6)", cycle_graph(6)}, {"star(4)", star_graph(4)}};
  for (const auto& [name, m] : models) {
    const auto sg = spectral_gap(m);
    c.near(asymptotic_variance(m, sg.eigenfunction), 2.0 * sg.cp * variance(m, sg.eigenfunction), 1e-8,
           name + " eigenfunction identity");
  }
  note = "two-point, complete(3), cycle(6), star(4)";
}

// 10. Simulation.
void simulation(Check& c, std::string& note) {
  const auto m = complete_graph(3);
  const auto rho = graph_metric(m);
  std::vector<double> g(3, -1.0 / 3.0);
  g[0] += 1.0;
  const auto paths = PathSystem::uniform_geodesic(m);
  ExperimentConfig cfg;
  cfg.t = 50.0;
  cfg.r_list = {0.1, 0.2, 0.4};
  cfg.trials = 10000;
  cfg.cG_upper = K_constant(m, paths, LengthFunction::uniform(m), rho);
  cfg.seed = 2024;
  const auto mu = ProbabilityVector::normalized({m.mu().begin(), m.mu().end()});
  const auto res = concentration_experiment(m, mu, g, rho, cfg);
  std::ostringstream s;
  s.precision(4);
  for (const auto& r : res.reports) {
    std::ostringstream w;
    w << "r=" << r.r << " tail " << r.tail_frequency << " bound " << r.bound;
    c.expect(r.pass, w.str());
    s << w.str() << "; ";
  }
  c.at_most(std::abs(res.mean_time_average - res.mu_g), 3.0 * res.mean_standard_error, "ergodic mean");
  s << "mean " << res.mean_time_average << " +- " << res.mean_standard_error;
  note = s.str();
}

// 11. Consistency on every model family used above.
void consistency(Check& c, std::string& note) {
  std::vector<ReversibleModel> models;
  for (std::size_t n = 2; n <= 8; ++n) models.push_back(complete_graph(n));
  for (std::size_t n = 3; n <= 10; ++n) models.push_back(star_graph(n));
  for (std::size_t p = 3; p <= 12; ++p) models.push_back(cycle_graph(p));
  for (std::size_t d = 2; d <= 5; ++d) models.push_back(binary_tree(d));
  models.push_back(johnson_graph(5, 2));
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20; ++i) models.push_back(random_model(rng, std::uniform_int_distribution<std::size_t>(2, 10)(rng)));
  for (int i = 0; i < 6; ++i) models.push_back(random_birth_death(rng, 3 + static_cast<std::size_t>(i)));
  double worst = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& m = models[i];
    const auto paths = PathSystem::uniform_geodesic(m);
    const auto disc = Metric::discrete(m.vertex_count());
    for (const auto& w : {LengthFunction::uniform(m), random_lengths(rng, m)}) {
      const double k = K_constant(m, paths, w, disc);
      const double p11 = poincare_bound(m, paths, w);
      worst = std::max(worst, std::abs(k - p11));
      c.near(k, p11, 1e-12, "model " + std::to_string(i) + " K(discrete) vs length-function Poincare bound");
      c.at_most(spectral_cp(m), ls_bound(m, paths, w), "model " + std::to_string(i) + " c_P vs ls_bound");
    }
  }
  std::ostringstream s;
  s << models.size() << " models, max |K_discrete - poincare_length| " << worst;
  note = s.str();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Check&, std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "complete graphs", complete_graphs},
      {2, "star graphs", star_graphs},
      {3, "cycles", cycles},
      {4, "binary trees", binary_trees},
      {5, "birth-death sharpness of optimized w", birth_death_sharpness},
      {6, "transport oracle", transport_oracle},
      {7, "inequality property suite", inequality_suite},
      {8, "Johnson graph J(5,2)", johnson},
      {9, "asymptotic variance", asymptotic},
      {10, "simulated Gaussian concentration", simulation},
      {11, "consistency", consistency},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    Check c;
    std::string note;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(c, note);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d %s: %s (%.1fs)%s%s\n", c.ok ? "PASS" : "FAIL", cr.id, cr.title, note.c_str(), secs,
                c.ok ? "" : " -- ", c.ok ? "" : c.why.str().c_str());
    std::fflush(stdout);
    failures += !c.ok;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
