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

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vchar/quality.hpp"

namespace vchar {
namespace {

using testing::igd_oracle;
using testing::Point3;

ObjectiveVector ov(double safe, double diff, int num) { return {safe, diff, num}; }

FrontSet set_of(std::vector<ObjectiveVector> pts) { return FrontSet{std::move(pts), {}}; }

std::vector<Point3> arrays(const FrontSet& f) {
  std::vector<Point3> out;
  for (const auto& p : f.points) out.push_back(p.as_array());
  return out;
}

RunArchive archive_with_front(std::vector<ObjectiveVector> pts, std::uint64_t seed) {
  RunArchive a;
  a.config.seed = seed;
  for (const auto& p : pts) {
    EvaluationRecord r;
    r.objectives = p;
    a.evaluations.push_back(r);
  }
  finalize_archive(a);
  return a;
}

TEST(ExtractFront, HandExample) {
  const std::vector<ObjectiveVector> pts{ov(1, 1, 1), ov(2, 2, 2), ov(0, 3, 3)};
  const auto f = extract_pareto_front(pts);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f.points[0], ov(1, 1, 1));
  EXPECT_EQ(f.points[1], ov(0, 3, 3));
}

TEST(ExtractFront, SingleAndIdentical) {
  const std::vector<ObjectiveVector> one{ov(4, 0.5, 2)};
  EXPECT_EQ(extract_pareto_front(one).points, one);
  const std::vector<ObjectiveVector> same(5, ov(1, 2, 3));
  EXPECT_EQ(extract_pareto_front(same).size(), 1u);
}

TEST(ExtractFront, NoWeakDominationInside) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ObjectiveVector> pts;
    for (int i = 0; i < 60; ++i) pts.push_back(ov(gen() % 5, 0.1 * (gen() % 5), static_cast<int>(gen() % 5)));
    const auto f = arrays(extract_pareto_front(pts));
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (i != j) {
          EXPECT_FALSE(weakly_dominates(f[i], f[j]));
        }
      }
    }
  }
}

TEST(ReferenceFront, Merges) {
  const std::vector<RunArchive> one{archive_with_front({ov(1, 2, 2), ov(3, 3, 3)}, 1)};
  EXPECT_EQ(build_reference_front(one).points, std::vector<ObjectiveVector>{ov(1, 2, 2)});

  const std::vector<RunArchive> twins{archive_with_front({ov(1, 2, 2)}, 1), archive_with_front({ov(1, 2, 2)}, 2)};
  const auto t = build_reference_front(twins);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.provenance[0].seed, 1u);

  const std::vector<RunArchive> pair{archive_with_front({ov(1, 2, 2)}, 1), archive_with_front({ov(2, 1, 2)}, 2)};
  EXPECT_EQ(build_reference_front(pair).size(), 2u);
  EXPECT_THROW(build_reference_front(std::span<const RunArchive>{}), InputError);
}

TEST(Igd, SelfDistanceIsZero) {
  const auto f = set_of({ov(0, 0.1, 1), ov(1, 0, 2)});
  EXPECT_EQ(igd(f, f), 0.0);
}

TEST(Igd, HandDistances) {
  // Reference (0,0,0), (0,1,0); front (1,0,0): distances 1 and sqrt 2.
  EXPECT_DOUBLE_EQ(igd(set_of({ov(1, 0, 0)}), set_of({ov(0, 0, 0), ov(0, 1, 0)})), (1.0 + std::sqrt(2.0)) / 2.0);
  // Reference (0,0,0), (1,1,0); front (1,0,0): both distances are 1.
  EXPECT_DOUBLE_EQ(igd(set_of({ov(1, 0, 0)}), set_of({ov(0, 0, 0), ov(1, 1, 0)})), 1.0);
}

TEST(Igd, EmptyInputs) {
  EXPECT_TRUE(std::isinf(igd(FrontSet{}, set_of({ov(0, 0, 0)}))));
  EXPECT_THROW(igd(set_of({ov(0, 0, 0)}), FrontSet{}), InputError);
}

FrontSet random_set(std::mt19937_64& gen, std::size_t n) {
  std::vector<ObjectiveVector> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(ov(std::uniform_real_distribution<double>(-3, 5)(gen), std::uniform_real_distribution<double>(0, 0.3)(gen),
                     static_cast<int>(gen() % 13)));
  }
  return set_of(pts);
}

TEST(Igd, MatchesDoubleLoopOracle) {
  std::mt19937_64 gen(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_set(gen, 1 + gen() % 40);
    const auto r = random_set(gen, 1 + gen() % 40);
    EXPECT_NEAR(igd(f, r), igd_oracle(arrays(f), arrays(r)), 1e-12);
  }
}

TEST(Igd, TranslationInvariant) {
  std::mt19937_64 gen(33);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_set(gen, 1 + gen() % 20);
    auto r = random_set(gen, 1 + gen() % 20);
    const double before = igd(f, r);
    const double ds = std::uniform_real_distribution<double>(-10, 10)(gen);
    const double dd = std::uniform_real_distribution<double>(-1, 1)(gen);
    const int dn = static_cast<int>(gen() % 7);
    for (auto* s : {&f, &r}) {
      for (auto& p : s->points) p = ov(p.f_safe + ds, p.f_diff + dd, p.f_num_diff + dn);
    }
    EXPECT_NEAR(igd(f, r), before, 1e-9);
  }
}

TEST(Igd, DominatedAdditionNeverIncreases) {
  std::mt19937_64 gen(34);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_set(gen, 1 + gen() % 20);
    const auto r = random_set(gen, 1 + gen() % 20);
    const double before = igd(f, r);
    // Worse than an existing member but inside the joint bounding box, so the
    // normalisation is unchanged.
    ObjectiveVector hi = f.points[0];
    for (const FrontSet* s : std::initializer_list<const FrontSet*>{&f, &r}) {
      for (const auto& p : s->points) {
        hi = ov(std::max(hi.f_safe, p.f_safe), std::max(hi.f_diff, p.f_diff), std::max(hi.f_num_diff, p.f_num_diff));
      }
    }
    const auto base = f.points[gen() % f.size()];
    const double u = std::uniform_real_distribution<double>(0, 1)(gen);
    f.points.push_back(ov(base.f_safe + u * (hi.f_safe - base.f_safe), base.f_diff + u * (hi.f_diff - base.f_diff),
                          base.f_num_diff + static_cast<int>(u * (hi.f_num_diff - base.f_num_diff))));
    EXPECT_LE(igd(f, r), before);
  }
}

}  // namespace
}  // namespace vchar
