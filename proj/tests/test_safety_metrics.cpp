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

#include <random>

#include "metric_fixtures.hpp"
#include "test_support.hpp"
#include "vchar/safety_metrics.hpp"
#include "vchar/simulator.hpp"

namespace vchar {
namespace {

using testing::metric_fixtures;

class Fixture : public ::testing::TestWithParam<std::size_t> {};

TEST_P(Fixture, MatchesHandEvaluation) {
  const auto& fx = metric_fixtures()[GetParam()];
  SCOPED_TRACE(fx.name);
  const auto trace = fx.trace();
  const auto series = ttc_series(trace);
  EXPECT_NEAR(tet(series, fx.ttc_star, fx.time_step), fx.tet, 1e-12);
  EXPECT_NEAR(tit(series, fx.ttc_star, fx.time_step), fx.tit, 1e-12);
  EXPECT_NEAR(ave_dece(trace), fx.ave_dece, 1e-12);

  const auto rec = compute_safety_record(trace, fx.ttc_star, fx.time_step);
  EXPECT_EQ(rec.tet, tet(series, fx.ttc_star, fx.time_step));
  EXPECT_EQ(rec.ttc_star_used, fx.ttc_star);
}

INSTANTIATE_TEST_SUITE_P(Traces, Fixture, ::testing::Range<std::size_t>(0, 20));

TEST(Fixtures, TwentyTraces) { EXPECT_EQ(metric_fixtures().size(), 20u); }

TEST(SafetyDegree, ClearanceWhenSafe) {
  SimulationTrace t;
  t.min_distance = 2.7;
  EXPECT_EQ(safety_degree(t), 2.7);
}

TEST(SafetyDegree, NegatedSpeedOnCollision) {
  SimulationTrace t;
  t.min_distance = -0.2;
  t.collided = true;
  t.collision_speed = 3.0;
  EXPECT_EQ(safety_degree(t), -3.0);
}

TEST(SafetyDegree, GrazingContactIsZero) {
  SimulationTrace t;
  t.min_distance = 0.0;
  t.collided = true;
  t.collision_speed = 0.0;
  EXPECT_EQ(safety_degree(t), 0.0);
}

TEST(TtcSeries, Examples) {
  SimulationTrace t;
  TrajectorySample s;
  s.obstacle_distance = 10;
  s.relative_speed = 5;
  t.samples.push_back(s);
  s.t = 0.1;
  s.relative_speed = -1;
  t.samples.push_back(s);
  const auto series = ttc_series(t);
  ASSERT_EQ(series.size(), 1u);
  EXPECT_EQ(series[0].ttc, 2.0);
  EXPECT_TRUE(ttc_series(SimulationTrace{}).empty());
}

TEST(Tet, Examples) {
  const std::vector<TtcPoint> s{{0, 1.0}, {0.1, 2.0}, {0.2, 0.5}};
  EXPECT_NEAR(tet(s, 1.5, 0.1), 0.2, 1e-15);
  EXPECT_NEAR(tit(s, 1.5, 0.1), 0.15, 1e-15);
  EXPECT_EQ(tet(s, 0.4, 0.1), 0.0);
  EXPECT_EQ(tit(s, 0.4, 0.1), 0.0);
  const std::vector<TtcPoint> edge{{0, 1.5}};
  EXPECT_EQ(tit(edge, 1.5, 0.1), 0.0);
}

std::vector<TtcPoint> random_series(std::mt19937_64& gen) {
  std::vector<TtcPoint> s;
  const auto n = gen() % 60;
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back({0.01 * static_cast<double>(i), std::uniform_real_distribution<double>(-1.0, 6.0)(gen)});
  }
  return s;
}

TEST(Properties, ExposureBounds) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_series(gen);
    const double star = std::uniform_real_distribution<double>(0.1, 4.0)(gen);
    const double e = tet(s, star, 0.01);
    const double i = tit(s, star, 0.01);
    EXPECT_GE(e, 0.0);
    EXPECT_GE(i, 0.0);
    EXPECT_LE(e, static_cast<double>(s.size()) * 0.01 + 1e-12);
    EXPECT_LE(i, e * star + 1e-12);
  }
}

TEST(Properties, MonotoneInThreshold) {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_series(gen);
    double a = std::uniform_real_distribution<double>(0.1, 4.0)(gen);
    double b = std::uniform_real_distribution<double>(0.1, 4.0)(gen);
    if (a > b) std::swap(a, b);
    EXPECT_LE(tet(s, a, 0.01), tet(s, b, 0.01));
    EXPECT_LE(tit(s, a, 0.01), tit(s, b, 0.01) + 1e-12);
  }
}

TEST(Properties, TtcScaleInvariant) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 200; ++trial) {
    SimulationTrace t;
    for (int k = 0; k < 20; ++k) {
      TrajectorySample s;
      s.t = 0.01 * k;
      s.obstacle_distance = std::uniform_real_distribution<double>(0.1, 50.0)(gen);
      s.relative_speed = std::uniform_real_distribution<double>(-2.0, 10.0)(gen);
      t.samples.push_back(s);
    }
    const double c = std::uniform_real_distribution<double>(0.01, 100.0)(gen);
    auto scaled = t;
    for (auto& s : scaled.samples) {
      s.obstacle_distance *= c;
      s.relative_speed *= c;
    }
    const auto a = ttc_series(t);
    const auto b = ttc_series(scaled);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].t, b[i].t);
      EXPECT_DOUBLE_EQ(a[i].ttc, b[i].ttc);
    }
  }
}

TEST(Properties, SimulatedRecordsRespectInvariants) {
  std::mt19937_64 gen(24);
  const auto& table = testing::carla();
  for (int trial = 0; trial < 100; ++trial) {
    Assignment a;
    for (const auto& s : table.specs()) a.values.push_back(std::uniform_real_distribution<double>(s.lower, s.upper)(gen));
    auto scenario = pedestrian_crossing(trial % 2 ? Weather::rain : Weather::sun);
    const auto trace = simulate(make_vehicle_params(table, a), scenario);
    const auto r = compute_safety_record(trace, scenario.ttc_star, scenario.time_step);
    EXPECT_GE(r.tet, 0.0);
    EXPECT_GE(r.tit, 0.0);
    EXPECT_GE(r.ave_dece, 0.0);
    EXPECT_LE(r.tet, scenario.horizon);
    EXPECT_EQ(r.safety_degree > 0, !trace.collided);
  }
}

}  // namespace
}  // namespace vchar
