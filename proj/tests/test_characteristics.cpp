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
#include <fstream>
#include <random>

#include "test_support.hpp"
#include "vchar/characteristics.hpp"
#include "vchar/table_io.hpp"

namespace vchar {
namespace {

using testing::carla;
using testing::lgsvl;

CharacteristicTable one(double original, double lower, double upper) {
  return CharacteristicTable("t", {{"mass", "kg", original, lower, upper}});
}

TEST(Table, ShippedTablesAreValid) {
  EXPECT_TRUE(validate_table(carla()).empty());
  EXPECT_TRUE(validate_table(lgsvl()).empty());
  EXPECT_EQ(carla().size(), 12u);
  EXPECT_EQ(lgsvl().size(), 12u);
}

TEST(Table, CarlaMassRow) {
  const auto i = carla().index_of("mass");
  ASSERT_TRUE(i);
  EXPECT_EQ(carla()[*i].original, 2404.0);
  EXPECT_EQ(carla()[*i].lower, 2040.0);
  EXPECT_EQ(carla()[*i].upper, 2700.0);
}

TEST(Table, OrderFollowsFile) {
  const auto names = carla().names();
  EXPECT_EQ(names.front(), "max_rpm");
  EXPECT_EQ(names.back(), "maxBrakeTorque");
}

TEST(Validate, EmptyRange) {
  const auto issues = validate_table(one(5, 5, 5));
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].rule, "empty range");
  EXPECT_EQ(issues[0].characteristic, "mass");
}

TEST(Validate, OriginalOutsideDomain) {
  const auto issues = validate_table(one(9999, 2040, 2700));
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].rule, "original outside domain");
}

TEST(Validate, InvertedAndDuplicate) {
  CharacteristicTable t("t", {{"a", "", 1, 2, 0}, {"a", "", 1, 0, 2}});
  const auto issues = validate_table(t);
  ASSERT_EQ(issues.size(), 3u);
  EXPECT_EQ(issues[0].rule, "inverted range");
  EXPECT_EQ(issues[1].rule, "original outside domain");
  EXPECT_EQ(issues[2].rule, "duplicate name");
}

TEST(Validate, OneEntryPerViolation) {
  CharacteristicTable t("t", {{"a", "", 1, 0, 2}, {"b", "", 7, 3, 3}, {"c", "", 0.5, 0, 1}});
  const auto issues = validate_table(t);
  ASSERT_EQ(issues.size(), 2u);
  for (const auto& i : issues) EXPECT_EQ(i.characteristic, "b");
  EXPECT_THROW(require_valid(t), ConfigError);
}

TEST(Clamp, Examples) {
  const auto t = one(2404, 2040, 2700);
  EXPECT_EQ(clamp_assignment(Assignment({2404}), t)[0], 2404);
  EXPECT_EQ(clamp_assignment(Assignment({1999}), t)[0], 2040);
  EXPECT_EQ(clamp_assignment(Assignment({3000}), t)[0], 2700);
}

TEST(Clamp, LengthMismatch) {
  EXPECT_THROW(clamp_assignment(Assignment({1, 2}), one(2404, 2040, 2700)), StructuralError);
}

TEST(Clamp, IdempotentAndInRange) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v;
    for (const auto& s : carla().specs()) {
      std::uniform_real_distribution<double> d(s.lower - s.width(), s.upper + s.width());
      v.push_back(d(gen));
    }
    const auto once = clamp_assignment(Assignment(v), carla());
    EXPECT_EQ(clamp_assignment(once, carla()), once);
    EXPECT_TRUE(within_bounds(once, carla()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (carla()[i].contains(v[i])) {
        EXPECT_EQ(once[i], v[i]);
      }
    }
  }
}

TEST(RelativeChanges, Identity) {
  const auto orig = carla().originals();
  for (const auto& c : relative_changes(orig, orig)) {
    EXPECT_FALSE(c.selected);
    EXPECT_EQ(c.pc, 0.0);
    EXPECT_EQ(c.delta, 0.0);
  }
}

TEST(RelativeChanges, MassTenPercent) {
  const auto c = relative_changes(Assignment({2404}), Assignment({2644.4}));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(c[0].selected);
  EXPECT_NEAR(c[0].pc, 0.10, 1e-12);
  EXPECT_NEAR(c[0].delta, 240.4, 1e-9);
}

TEST(RelativeChanges, RadiusDecrease) {
  const auto c = relative_changes(Assignment({35.5}), Assignment({32.41}));
  EXPECT_NEAR(c[0].pc, 0.087, 5e-4);
  EXPECT_NEAR(c[0].delta, -3.09, 1e-9);
}

TEST(RelativeChanges, ZeroOriginalNamesCharacteristic) {
  const std::vector<std::string> names{"gain"};
  try {
    relative_changes(Assignment({0.0}), Assignment({1.0}), names);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("gain"), std::string::npos);
  }
}

TEST(RelativeChanges, UnselectedHasZeroFields) {
  const auto orig = carla().originals();
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto mod = orig;
    for (std::size_t i = 0; i < mod.size(); ++i) {
      if (gen() % 2) mod[i] = std::uniform_real_distribution<double>(carla()[i].lower, carla()[i].upper)(gen);
    }
    const auto changes = relative_changes(orig, mod);
    for (std::size_t i = 0; i < changes.size(); ++i) {
      EXPECT_EQ(changes[i].selected, mod[i] != orig[i]);
      if (!changes[i].selected) {
        EXPECT_EQ(changes[i].pc, 0.0);
        EXPECT_EQ(changes[i].delta, 0.0);
      }
      EXPECT_GE(changes[i].pc, 0.0);
    }
  }
}

TEST(RelativeChanges, BoundedByDomainExtent) {
  const auto orig = carla().originals();
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v;
    for (const auto& s : carla().specs()) {
      v.push_back(std::uniform_real_distribution<double>(s.lower - 3 * s.width(), s.upper + 3 * s.width())(gen));
    }
    const auto changes = relative_changes(orig, clamp_assignment(Assignment(v), carla()));
    for (std::size_t i = 0; i < changes.size(); ++i) {
      const auto& s = carla()[i];
      const double bound = std::max(std::abs(s.lower - s.original), std::abs(s.upper - s.original)) / s.original;
      EXPECT_LE(changes[i].pc, bound + 1e-15);
    }
  }
}

TEST(TableIo, UnknownKeyReportsLocation) {
  const std::string text =
      "label: x\n"
      "characteristics:\n"
      "  - name: a\n"
      "    original: 1\n"
      "    lower: 0\n"
      "    upper: 2\n"
      "    colour: red\n";
  try {
    parse_table_string(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("colour"), std::string::npos);
    EXPECT_NE(what.find("line 7"), std::string::npos);
  }
}

TEST(TableIo, InvalidDomainRejected) {
  const std::string text =
      "label: x\n"
      "characteristics:\n"
      "  - {name: a, original: 5, lower: 0, upper: 2}\n";
  EXPECT_THROW(parse_table_string(text), ConfigError);
}

TEST(TableIo, MissingFieldRejected) {
  EXPECT_THROW(parse_table_string("label: x\ncharacteristics:\n  - {name: a, lower: 0, upper: 2}\n"), ConfigError);
}

}  // namespace
}  // namespace vchar
