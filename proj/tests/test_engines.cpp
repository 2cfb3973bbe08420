// Copyright 2026 The vchar Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "test_support.hpp"
#include "vchar/engines.hpp"

namespace vchar {
namespace {

using testing::carla;

const EvaluationContext& sun_ctx() {
  static const auto ctx = EvaluationContext::make(carla(), pedestrian_crossing());
  return ctx;
}

SearchConfig config(Algorithm a, std::size_t pop, std::size_t budget, std::uint64_t seed = 1) {
  SearchConfig c;
  c.algorithm = a;
  c.population_size = pop;
  c.max_evaluations = budget;
  c.seed = seed;
  return c;
}

// Every call returns the trace of the unmodified vehicle.
SimulatorBackend constant_backend() {
  const auto trace = simulate(make_vehicle_params(carla(), carla().originals()), pedestrian_crossing());
  return [trace](const VehicleParams&, const ScenarioConfig&) { return trace; };
}

EvaluationRecord record(double safe, double diff, int num) {
  EvaluationRecord r;
  r.objectives = {safe, diff, num};
  r.safety.safety_degree = safe;
  return r;
}

void expect_well_formed(const RunArchive& a) {
  EXPECT_LE(a.evaluations.size(), a.config.max_evaluations);
  for (const auto& r : a.evaluations) ASSERT_TRUE(within_bounds(r.raw, carla()));
  const auto pts = a.final_front_points();
  for (const auto& p : pts) {
    for (const auto& q : pts) EXPECT_FALSE(dominates(p.as_array(), q.as_array()));
  }
}

TEST(Nsga2, GenerationCountFollowsBudget) {
  const auto a = run_search(config(Algorithm::nsga2, 50, 5000), sun_ctx());
  EXPECT_EQ(a.evaluations.size(), 5000u);
  EXPECT_EQ(a.generations, 100u);
  EXPECT_EQ(a.evaluations.back().generation, 99u);
  expect_well_formed(a);
}

TEST(Nsga2, BudgetEqualToPopulationIsInitialOnly) {
  const auto a = run_search(config(Algorithm::nsga2, 20, 20), sun_ctx());
  EXPECT_EQ(a.evaluations.size(), 20u);
  EXPECT_EQ(a.generations, 1u);
  for (const auto& r : a.evaluations) EXPECT_EQ(r.generation, 0u);
}

TEST(Nsga2, PartialLastGeneration) {
  const auto a = run_search(config(Algorithm::nsga2, 20, 50), sun_ctx());
  EXPECT_EQ(a.evaluations.size(), 50u);
  EXPECT_EQ(a.generations, 3u);
}

TEST(RandomSearch, BudgetTenReproducible) {
  const auto a = run_search(config(Algorithm::random, 10, 10, 42), sun_ctx());
  EXPECT_EQ(a.evaluations.size(), 10u);
  EXPECT_EQ(run_search(config(Algorithm::random, 10, 10, 42), sun_ctx()), a);
  EXPECT_NE(run_search(config(Algorithm::random, 10, 10, 43), sun_ctx()), a);
  expect_well_formed(a);
}

TEST(Config, Rejected) {
  EXPECT_THROW(run_search(config(Algorithm::nsga2, 0, 10), sun_ctx()), ConfigError);
  EXPECT_THROW(run_search(config(Algorithm::nsga2, 20, 10), sun_ctx()), ConfigError);
  auto c = config(Algorithm::nsga2, 20, 40);
  c.crossover_rate = 1.5;
  EXPECT_THROW(run_search(c, sun_ctx()), ConfigError);
  c = config(Algorithm::safefuzzer, 20, 40);
  c.fuzzer_weights = {0, 0, 0};
  EXPECT_THROW(run_search(c, sun_ctx()), ConfigError);
  EXPECT_THROW(run_nsga2(config(Algorithm::random, 10, 10), sun_ctx()), ConfigError);
}

class Determinism : public ::testing::TestWithParam<Algorithm> {};

TEST_P(Determinism, SeedFixesArchiveAtAnyParallelism) {
  const auto c = config(GetParam(), 20, 300, 7);
  const auto serial = run_search(c, sun_ctx());
  EXPECT_EQ(run_search(c, sun_ctx()), serial);
  RunOptions wide;
  wide.parallel = 8;
  EXPECT_EQ(run_search(c, sun_ctx(), wide), serial);
  expect_well_formed(serial);
}

INSTANTIATE_TEST_SUITE_P(Engines, Determinism,
                         ::testing::Values(Algorithm::nsga2, Algorithm::random, Algorithm::safefuzzer),
                         [](const auto& info) { return to_string(info.param); });

TEST(Engines, GenerationCallbackSeesEveryRecord) {
  RunOptions opt;
  std::size_t seen = 0;
  std::size_t last = 0;
  opt.on_generation = [&](std::span<const EvaluationRecord> batch, std::size_t g) {
    seen += batch.size();
    last = g;
  };
  const auto a = run_search(config(Algorithm::nsga2, 20, 100), sun_ctx(), opt);
  EXPECT_EQ(seen, a.evaluations.size());
  EXPECT_EQ(last + 1, a.generations);
}

TEST(Engines, AbortCarriesCompleteGenerations) {
  auto ctx = EvaluationContext::make(carla(), pedestrian_crossing());
  auto inner = internal_backend();
  std::atomic<int> calls{0};
  ctx.backend = [&](const VehicleParams& p, const ScenarioConfig& s) {
    if (++calls > 45) throw SimulationError("scripted failure", 3);
    return inner(p, s);
  };
  try {
    run_search(config(Algorithm::nsga2, 20, 200), ctx);
    FAIL() << "expected RunAborted";
  } catch (const RunAborted& e) {
    EXPECT_EQ(e.partial().evaluations.size(), 40u);
    EXPECT_EQ(e.partial().generations, 2u);
    EXPECT_EQ(e.raw().size(), carla().size());
  }
}

TEST(Replay, ReusesMatchingPrefix) {
  const auto c = config(Algorithm::nsga2, 20, 100, 3);
  const auto full = run_search(c, sun_ctx());
  auto ctx = sun_ctx();
  std::atomic<int> calls{0};
  auto inner = internal_backend();
  ctx.backend = [&](const VehicleParams& p, const ScenarioConfig& s) {
    ++calls;
    return inner(p, s);
  };
  RunOptions opt;
  const std::vector<EvaluationRecord> prefix(full.evaluations.begin(), full.evaluations.begin() + 60);
  opt.replay = prefix;
  EXPECT_EQ(run_search(c, ctx, opt), full);
  EXPECT_EQ(calls.load(), 40);
}

TEST(FitnessScore, Examples) {
  const std::array<double, 3> w{6, 1, 1};
  const std::vector<EvaluationRecord> ab{record(0, 0, 0), record(1, 1, 12)};
  const auto s = fuzzer_fitness_score(ab, w);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[1], 0.0);
  const std::vector<EvaluationRecord> same{record(2, 0.1, 3), record(2, 0.1, 3)};
  EXPECT_EQ(fuzzer_fitness_score(same, w), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(fuzzer_fitness_score(std::vector<EvaluationRecord>{record(1, 1, 1)}, w), std::vector<double>{0.5});
}

TEST(FitnessScore, WeightedHandValue) {
  // Spans: safe 4, diff 0.2, num 4. Middle record: (4-2)/4, (0.2-0.05)/0.2, (4-1)/4.
  const std::vector<EvaluationRecord> r{record(0, 0.2, 4), record(2, 0.05, 1), record(4, 0, 0)};
  const auto s = fuzzer_fitness_score(r, {6, 1, 1});
  EXPECT_NEAR(s[1], (6 * 0.5 + 0.75 + 0.75) / 8.0, 1e-15);
  EXPECT_NEAR(s[0], 6.0 / 8.0, 1e-15);
  EXPECT_NEAR(s[2], 2.0 / 8.0, 1e-15);
}

TEST(TopScored, TiesToLowerIndex) {
  const std::vector<double> s{0.2, 0.9, 0.5, 0.9, 0.5};
  EXPECT_EQ(top_scored(s, 3), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(top_scored(s, 10).size(), 5u);
}

TEST(FuzzerState, MeanCountOfFourAndSix) {
  const auto bounds = Bounds::of(carla());
  const auto orig = carla().originals();
  auto a = record(-1, 0.1, 4), b = record(-2, 0.1, 6);
  a.filtered = b.filtered = orig;
  const std::vector<EvaluationRecord> window{a, b};
  const auto next = update_fuzzer_state(FuzzerState::initial(bounds), window, orig, bounds, 3.0);
  EXPECT_EQ(next.max_num, 5u);
}

TEST(FuzzerState, RangeMeansPerSide) {
  CharacteristicTable t("t", {{"a", "", 10, 0, 20}, {"b", "", 5, 0, 10}});
  const auto bounds = Bounds::of(t);
  const Assignment orig({10, 5});
  auto r1 = record(0, 0, 2), r2 = record(0, 0, 2), r3 = record(0, 0, 1), safe = record(9, 0, 1);
  r1.filtered = Assignment({14, 2});
  r2.filtered = Assignment({18, 4});
  r3.filtered = Assignment({6, 5});
  safe.filtered = Assignment({1, 9});
  const std::vector<EvaluationRecord> window{r1, r2, r3, safe};
  const auto next = update_fuzzer_state(FuzzerState::initial(bounds), window, orig, bounds, 1.0);
  EXPECT_EQ(next.upper, (std::vector<double>{16, 10}));
  EXPECT_EQ(next.lower, (std::vector<double>{6, 3}));
  EXPECT_EQ(next.max_num, 2u);
}

TEST(FuzzerState, NoUnsafeLeavesStateUnchanged) {
  const auto bounds = Bounds::of(carla());
  FuzzerState s{bounds.lower, bounds.upper, 3};
  s.upper[0] -= 1;
  auto r = record(4, 0.1, 2);
  r.filtered = carla().originals();
  const std::vector<EvaluationRecord> window{r, r};
  EXPECT_EQ(update_fuzzer_state(s, window, carla().originals(), bounds, 3.0), s);
}

TEST(FuzzerState, MaxNumNonIncreasingWhenMeansStayUnderCap) {
  const auto bounds = Bounds::of(carla());
  const auto orig = carla().originals();
  std::mt19937_64 gen(17);
  auto state = FuzzerState::initial(bounds);
  for (int window = 0; window < 200; ++window) {
    std::vector<EvaluationRecord> w;
    const auto n = 1 + gen() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      auto r = record(-1, 0.1, 1 + static_cast<int>(gen() % state.max_num));
      r.filtered = orig;
      w.push_back(r);
    }
    const auto next = update_fuzzer_state(state, w, orig, bounds, 0.0);
    EXPECT_LE(next.max_num, state.max_num);
    EXPECT_GE(next.max_num, 1u);
    state = next;
  }
}

TEST(MutationGen, ChangesAtMostMaxNumWithinRange) {
  const auto bounds = Bounds::of(carla());
  FuzzerState s = FuzzerState::initial(bounds);
  s.max_num = 3;
  for (std::size_t i = 0; i < s.lower.size(); ++i) {
    s.lower[i] = carla()[i].original - 0.1 * (carla()[i].original - carla()[i].lower);
    s.upper[i] = carla()[i].original + 0.1 * (carla()[i].upper - carla()[i].original);
  }
  Rng rng(5);
  const auto parent = carla().originals();
  std::vector<int> hist(4, 0);
  for (int d = 0; d < 3000; ++d) {
    const auto child = mutation_gen(parent, s, rng);
    int changed = 0;
    for (std::size_t i = 0; i < child.size(); ++i) {
      if (child[i] != parent[i]) {
        ++changed;
        EXPECT_GE(child[i], s.lower[i]);
        EXPECT_LE(child[i], s.upper[i]);
      }
    }
    ASSERT_GE(changed, 1);
    ASSERT_LE(changed, 3);
    ++hist[changed];
  }
  for (int k = 1; k <= 3; ++k) EXPECT_GT(hist[k], 800);
}

TEST(Convergence, PlateauOfFive) {
  ConvergenceTracker t(5);
  const std::vector<std::size_t> top{1, 2, 3};
  for (int i = 0; i < 5; ++i) EXPECT_FALSE(t.observe(top));
  EXPECT_TRUE(t.observe(top));
  EXPECT_FALSE(t.observe({1, 2, 4}));
  EXPECT_EQ(t.stale(), 0u);
}

TEST(Convergence, FrozenScoresStopEarly) {
  // Indistinguishable safety with all weight on f_safe freezes every score at
  // 0.5, so the top set is the first population_size indices from the first
  // check after 500 evaluations (520) and the sixth check (620) stops.
  auto ctx = EvaluationContext::make(carla(), pedestrian_crossing(), constant_backend());
  auto c = config(Algorithm::safefuzzer, 20, 5000);
  c.fuzzer_weights = {1, 0, 0};
  const auto a = run_search(c, ctx);
  EXPECT_EQ(a.stop_reason, StopReason::converged);
  EXPECT_EQ(a.evaluations.size(), 620u);
}

TEST(Convergence, NotBeforeMinimumEvaluations) {
  auto ctx = EvaluationContext::make(carla(), pedestrian_crossing(), constant_backend());
  auto c = config(Algorithm::safefuzzer, 20, 500);
  c.fuzzer_weights = {1, 0, 0};
  const auto a = run_search(c, ctx);
  EXPECT_EQ(a.stop_reason, StopReason::budget);
  EXPECT_EQ(a.evaluations.size(), 500u);
}

TEST(SafeFuzzer, RealRunIsWellFormed) {
  const auto a = run_search(config(Algorithm::safefuzzer, 20, 1000, 11), sun_ctx());
  expect_well_formed(a);
  EXPECT_GT(a.evaluations.size(), 500u);
}

}  // namespace
}  // namespace vchar
