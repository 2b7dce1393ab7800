#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace pathineq;
using namespace testing_support;

namespace {

void expect_kind(ErrorKind kind, const std::function<void()>& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

OptimizeConfig quick(std::uint64_t seed = 1) {
  OptimizeConfig c;
  c.restarts = 2;
  c.max_iters = 60;
  c.seed = seed;
  return c;
}

void check_result(const ReversibleModel& m, const PathSystem& paths, const Objective& obj,
                  const OptimizationResult& r) {
  EXPECT_LE(r.value_best, r.value_at_uniform + 1e-12);
  EXPECT_NEAR(evaluate(m, paths, obj, r.w_best), r.value_best, 1e-12 * std::max(1.0, r.value_best));
  double total = 0.0;
  for (double v : r.w_best.values()) {
    EXPECT_GT(v, 0.0);
    total += v;
  }
  EXPECT_NEAR(total, static_cast<double>(m.undirected_count()), 1e-9 * total);
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1] + 1e-12);
  EXPECT_EQ(r.restarts, quick().restarts);
}

}  // namespace

TEST(CompiledObjective, MatchesDirectEvaluation) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 12; ++trial) {
    const auto m = random_model(rng, 3 + trial % 6, 0.4);
    const auto paths = PathSystem::uniform_geodesic(m);
    const auto phi = random_vector(rng, m.vertex_count(), 0.0, 2.0);
    for (const auto& obj : {Objective::log_sobolev(), Objective::poincare(), Objective::transport(graph_metric(m)),
                            Objective::weighted_poincare(phi)}) {
      const CompiledObjective compiled(m, paths, obj);
      for (int k = 0; k < 3; ++k) {
        const auto w = random_lengths(rng, m);
        const double direct = evaluate(m, paths, obj, w);
        EXPECT_NEAR(compiled(w.values()), direct, 1e-12 * std::max(1.0, direct)) << to_string(obj.kind);
        // Log-sum-exp is an upper bound on the max and converges to it.
        EXPECT_GE(compiled.smoothed(w.values(), 1e3 / direct), compiled(w.values()) * (1.0 - 1e-12));
        EXPECT_NEAR(compiled.smoothed(w.values(), 1e9 / direct), direct, 1e-6 * direct);
      }
    }
  }
}

TEST(CompiledObjective, ExplicitPaths) {
  const auto t = binary_tree(2);
  const auto paths = PathSystem::tree_unique(t);
  std::mt19937_64 rng(72);
  for (const auto& obj : {Objective::log_sobolev(), Objective::transport(graph_metric(t))}) {
    const CompiledObjective compiled(t, paths, obj);
    const auto w = random_lengths(rng, t);
    const double direct = evaluate(t, paths, obj, w);
    EXPECT_NEAR(compiled(w.values()), direct, 1e-12 * direct);
  }
}

TEST(GoldenSection, FindsInteriorMinimum) {
  const double x = detail::golden_section([](double t) { return (t - 1.3) * (t - 1.3) + 2.0; }, -6.0, 6.0, 1e-10);
  // Comparing function values near a smooth minimum resolves x only to about sqrt(eps).
  EXPECT_NEAR(x, 1.3, 1e-7);
}

TEST(OptimizeW, CompleteGraphK) {
  for (std::size_t n = 3; n <= 5; ++n) {
    const auto m = complete_graph(n);
    const auto paths = PathSystem::uniform_geodesic(m);
    const auto obj = Objective::transport(graph_metric(m));
    const auto r = optimize_w(m, paths, obj, quick());
    EXPECT_LE(r.value_best, (n - 1.0) / n + 1e-9);
    EXPECT_NEAR(r.value_at_uniform, (n - 1.0) / n, 1e-12);
    check_result(m, paths, obj, r);
  }
}

TEST(OptimizeW, BirthDeathPoincareIsNearlySharp) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 6; ++trial) {
    const auto m = random_birth_death(rng, 3 + trial % 4);
    const auto paths = PathSystem::uniform_geodesic(m);
    const auto r = optimize_w(m, paths, Objective::poincare(), quick());
    const double cp = spectral_cp(m);
    EXPECT_GE(r.value_best, cp * (1.0 - 1e-9));
    EXPECT_LE(r.value_best, 1.05 * cp);
    check_result(m, paths, Objective::poincare(), r);
  }
}

TEST(OptimizeW, AllObjectivesOnRandomModels) {
  std::mt19937_64 rng(74);
  for (int trial = 0; trial < 4; ++trial) {
    const auto m = random_model(rng, 4 + trial % 3, 0.3);
    const auto paths = PathSystem::uniform_geodesic(m);
    const auto phi = random_vector(rng, m.vertex_count(), 0.1, 2.0);
    for (const auto& obj : {Objective::log_sobolev(), Objective::poincare(), Objective::transport(graph_metric(m)),
                            Objective::weighted_poincare(phi)}) {
      const auto r = optimize_w(m, paths, obj, quick(trial + 1));
      check_result(m, paths, obj, r);
    }
  }
}

TEST(OptimizeW, Deterministic) {
  std::mt19937_64 rng(75);
  const auto m = random_model(rng, 6, 0.4);
  const auto paths = PathSystem::uniform_geodesic(m);
  const auto obj = Objective::transport(graph_metric(m));
  const auto a = optimize_w(m, paths, obj, quick(9));
  const auto b = optimize_w(m, paths, obj, quick(9));
  EXPECT_EQ(a.value_best, b.value_best);
  EXPECT_EQ(a.best_start, b.best_start);
  EXPECT_EQ(a.trace, b.trace);
  for (std::size_t k = 0; k < a.w_best.size(); ++k) EXPECT_EQ(a.w_best.undirected(k), b.w_best.undirected(k));
  auto threaded = quick(9);
  threaded.threads = 3;
  const auto c = optimize_w(m, paths, obj, threaded);
  EXPECT_EQ(a.value_best, c.value_best);
  EXPECT_EQ(a.best_start, c.best_start);
  for (std::size_t k = 0; k < a.w_best.size(); ++k) EXPECT_EQ(a.w_best.undirected(k), c.w_best.undirected(k));
}

TEST(OptimizeW, SmoothingNeverHurtsHere) {
  std::mt19937_64 rng(76);
  const auto m = random_model(rng, 6, 0.5);
  const auto paths = PathSystem::uniform_geodesic(m);
  const auto obj = Objective::transport(graph_metric(m));
  auto plain = quick();
  plain.smoothing = false;
  const auto off = optimize_w(m, paths, obj, plain);
  const auto on = optimize_w(m, paths, obj, quick());
  check_result(m, paths, obj, off);
  EXPECT_LE(on.value_best, off.value_best * (1.0 + 1e-6));
}

TEST(OptimizeW, BadObjective) {
  const auto m = complete_graph(3);
  const auto paths = PathSystem::uniform_geodesic(m);
  expect_kind(ErrorKind::BadObjective, [&] { optimize_w(m, paths, Objective::transport(Metric::discrete(4)), quick()); });
  expect_kind(ErrorKind::BadObjective,
              [&] { optimize_w(m, paths, Objective::weighted_poincare({1.0, -1.0, 1.0}), quick()); });
  expect_kind(ErrorKind::BadObjective, [&] { optimize_w(m, paths, Objective::weighted_poincare({1.0}), quick()); });
}
