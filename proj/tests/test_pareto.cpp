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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "oracles.hpp"
#include "vchar/nsga2.hpp"
#include "vchar/pareto.hpp"

namespace vchar {
namespace {

using testing::brute_force_layers;
using testing::Point3;
using testing::random_points;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Dominance, Basics) {
  const Point3 a{0, 0, 0}, b{0, 1, 0}, c{1, 0, 0};
  EXPECT_TRUE(dominates(a, b));
  EXPECT_FALSE(dominates(b, a));
  EXPECT_FALSE(dominates(a, a));
  EXPECT_FALSE(dominates(b, c));
  EXPECT_FALSE(dominates(c, b));
}

TEST(NonDominatedSort, SingleObjectiveChain) {
  const std::vector<std::vector<double>> pts{{0}, {1}};
  const auto fronts = fast_non_dominated_sort(pts);
  ASSERT_EQ(fronts.size(), 2u);
  EXPECT_EQ(fronts[0], std::vector<std::size_t>{0});
  EXPECT_EQ(fronts[1], std::vector<std::size_t>{1});
}

TEST(NonDominatedSort, TradeOffSharesFront) {
  const std::vector<std::vector<double>> pts{{0, 1}, {1, 0}};
  const auto fronts = fast_non_dominated_sort(pts);
  ASSERT_EQ(fronts.size(), 1u);
  EXPECT_EQ(fronts[0], (std::vector<std::size_t>{0, 1}));
}

TEST(NonDominatedSort, RejectsMixedArity) {
  const std::vector<std::vector<double>> pts{{0, 1}, {1}};
  EXPECT_THROW(fast_non_dominated_sort(pts), InputError);
}

TEST(NonDominatedSort, MatchesBruteForceOnRandomSets) {
  std::mt19937_64 gen(2026);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 199;
    const auto pts = random_points(gen, n, trial % 2 == 0);
    const auto got = fast_non_dominated_sort(pts);
    const auto want = brute_force_layers(pts);
    ASSERT_EQ(got.size(), want.size()) << "trial " << trial;
    std::set<std::size_t> seen;
    for (std::size_t f = 0; f < got.size(); ++f) {
      EXPECT_EQ(got[f], want[f]) << "trial " << trial << " front " << f;
      seen.insert(got[f].begin(), got[f].end());
    }
    EXPECT_EQ(seen.size(), n);
  }
}

TEST(Crowding, SmallFrontsAreInfinite) {
  EXPECT_EQ(crowding_distance(std::vector<Point3>{{1, 2, 3}}), std::vector<double>{kInf});
  EXPECT_EQ(crowding_distance(std::vector<Point3>{{1, 2, 3}, {3, 2, 1}}), (std::vector<double>{kInf, kInf}));
}

TEST(Crowding, CollinearInterior) {
  const std::vector<std::vector<double>> front{{0, 4}, {1, 3}, {3, 1}, {4, 0}};
  const auto d = crowding_distance(front);
  EXPECT_EQ(d[0], kInf);
  EXPECT_EQ(d[3], kInf);
  EXPECT_DOUBLE_EQ(d[1], 3.0 / 4.0 + 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(d[2], 3.0 / 4.0 + 3.0 / 4.0);
}

TEST(Crowding, ZeroSpanContributesNothing) {
  const std::vector<std::vector<double>> front{{0, 5}, {2, 5}, {4, 5}};
  const auto d = crowding_distance(front);
  EXPECT_DOUBLE_EQ(d[1], 1.0);
}

TEST(Crowding, NonNegative) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_points(gen, 3 + gen() % 40, trial % 2 == 0);
    for (double d : crowding_distance(pts)) EXPECT_GE(d, 0.0);
  }
}

TEST(ParetoIndices, DuplicatesCollapse) {
  const std::vector<Point3> pts{{1, 0, 0}, {0, 1, 0}, {1, 0, 0}, {2, 2, 2}};
  EXPECT_EQ(pareto_front_indices(pts), (std::vector<std::size_t>{0, 1}));
}

TEST(ParetoIndices, MutuallyNondominatedAndComplete) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_points(gen, 2 + gen() % 80, true);
    const auto idx = pareto_front_indices(pts);
    const auto first = brute_force_layers(pts).front();
    for (auto i : idx) {
      EXPECT_TRUE(std::ranges::binary_search(first, i));
      for (auto j : idx) EXPECT_FALSE(testing::oracle_dominates(pts[i], pts[j]));
    }
    for (auto i : first) {
      const bool kept = std::ranges::any_of(idx, [&](std::size_t j) { return pts[j] == pts[i]; });
      EXPECT_TRUE(kept);
    }
  }
}

std::vector<Individual> pool_of(const std::vector<Point3>& pts) {
  std::vector<Individual> pool;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Individual ind;
    ind.archive_index = i;
    ind.record.objectives = {pts[i][0], pts[i][1], static_cast<int>(pts[i][2])};
    pool.push_back(ind);
  }
  return pool;
}

TEST(EnvironmentalSelection, KeepsWholeBestFronts) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_points(gen, 40, true);
    const auto layers = brute_force_layers(pts);
    const std::size_t mu = 20;
    const auto chosen = environmental_selection(pool_of(pts), mu);
    ASSERT_EQ(chosen.size(), mu);
    std::set<std::size_t> picked;
    for (const auto& c : chosen) picked.insert(c.archive_index);
    std::size_t covered = 0;
    for (const auto& layer : layers) {
      if (covered + layer.size() > mu) {
        for (const auto& c : chosen) {
          if (std::ranges::binary_search(layer, c.archive_index)) continue;
          EXPECT_TRUE(std::ranges::any_of(layers, [&](const auto& l) {
            return &l < &layer && std::ranges::binary_search(l, c.archive_index);
          }));
        }
        break;
      }
      for (auto i : layer) EXPECT_TRUE(picked.count(i)) << "trial " << trial;
      covered += layer.size();
    }
  }
}

TEST(EnvironmentalSelection, TruncationPrefersBoundaries) {
  const std::vector<Point3> pts{{0, 4, 0}, {1, 3, 0}, {1.5, 2.5, 0}, {3, 1, 0}, {4, 0, 0}};
  const auto chosen = environmental_selection(pool_of(pts), 3);
  std::set<std::size_t> picked;
  for (const auto& c : chosen) picked.insert(c.archive_index);
  EXPECT_TRUE(picked.count(0));
  EXPECT_TRUE(picked.count(4));
  EXPECT_TRUE(picked.count(3));
}

TEST(Tournament, RankThenCrowdingThenIndex) {
  Individual a, b;
  a.rank = 0, b.rank = 1;
  EXPECT_TRUE(tournament_better(a, b));
  b.rank = 0, a.crowding = 1.0, b.crowding = 2.0;
  EXPECT_TRUE(tournament_better(b, a));
  a.crowding = b.crowding, a.archive_index = 3, b.archive_index = 1;
  EXPECT_TRUE(tournament_better(b, a));
}

}  // namespace
}  // namespace vchar
