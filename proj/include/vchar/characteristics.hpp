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

#pragma once

// Vehicle characteristic tables, candidate assignments and per-characteristic
// change accounting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vchar/error.hpp"

namespace vchar {

/// One configurable characteristic with its factory value and closed domain.
struct CharacteristicSpec {
  std::string name;
  std::string unit;
  double original = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  double width() const noexcept { return upper - lower; }
  bool contains(double v) const noexcept { return v >= lower && v <= upper; }

  bool operator==(const CharacteristicSpec&) const = default;
};

/// A vector of characteristic values, indexed in table order.
struct Assignment {
  std::vector<double> values;

  Assignment() = default;
  explicit Assignment(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  auto begin() const noexcept { return values.begin(); }
  auto end() const noexcept { return values.end(); }

  bool operator==(const Assignment&) const = default;
  auto operator<=>(const Assignment&) const = default;
};

/// Ordered, uniquely named set of characteristics; order defines the index.
class CharacteristicTable {
 public:
  CharacteristicTable() = default;
  CharacteristicTable(std::string label, std::vector<CharacteristicSpec> specs)
      : label_(std::move(label)), specs_(std::move(specs)) {}

  const std::string& label() const noexcept { return label_; }
  std::span<const CharacteristicSpec> specs() const noexcept { return specs_; }
  std::size_t size() const noexcept { return specs_.size(); }
  const CharacteristicSpec& operator[](std::size_t i) const { return specs_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      if (specs_[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(specs_.size());
    for (const auto& s : specs_) out.push_back(s.name);
    return out;
  }

  Assignment originals() const {
    std::vector<double> v;
    v.reserve(specs_.size());
    for (const auto& s : specs_) v.push_back(s.original);
    return Assignment(std::move(v));
  }

  std::vector<double> lower_bounds() const {
    std::vector<double> v;
    for (const auto& s : specs_) v.push_back(s.lower);
    return v;
  }

  std::vector<double> upper_bounds() const {
    std::vector<double> v;
    for (const auto& s : specs_) v.push_back(s.upper);
    return v;
  }

  bool operator==(const CharacteristicTable&) const = default;

 private:
  std::string label_;
  std::vector<CharacteristicSpec> specs_;
};

struct ValidationIssue {
  std::string characteristic;
  std::string rule;

  bool operator==(const ValidationIssue&) const = default;
};

/// Checks every spec invariant; an empty result means the table is valid.
inline std::vector<ValidationIssue> validate_table(const CharacteristicTable& table) {
  std::vector<ValidationIssue> issues;
  std::set<std::string> seen;
  for (const auto& s : table.specs()) {
    if (s.name.empty()) issues.push_back({s.name, "empty name"});
    if (!seen.insert(s.name).second) issues.push_back({s.name, "duplicate name"});
    if (!std::isfinite(s.original) || !std::isfinite(s.lower) || !std::isfinite(s.upper)) {
      issues.push_back({s.name, "non-finite value"});
      continue;
    }
    if (s.lower == s.upper) {
      issues.push_back({s.name, "empty range"});
    } else if (s.lower > s.upper) {
      issues.push_back({s.name, "inverted range"});
    }
    if (s.original < s.lower || s.original > s.upper) {
      issues.push_back({s.name, "original outside domain"});
    }
  }
  if (table.size() == 0) issues.push_back({"", "empty table"});
  return issues;
}

/// Throws ConfigError listing every violation.
inline void require_valid(const CharacteristicTable& table) {
  auto issues = validate_table(table);
  if (issues.empty()) return;
  std::string msg = "invalid characteristic table '" + table.label() + "':";
  for (const auto& i : issues) msg += " [" + i.characteristic + ": " + i.rule + "]";
  throw ConfigError(msg);
}

inline void require_same_length(std::size_t a, std::size_t b, std::string_view what) {
  if (a != b) {
    throw StructuralError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

inline Assignment clamp_assignment(const Assignment& a, const CharacteristicTable& table) {
  require_same_length(a.size(), table.size(), "clamp_assignment");
  Assignment out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(out[i], table[i].lower, table[i].upper);
  }
  return out;
}

inline bool within_bounds(const Assignment& a, const CharacteristicTable& table) {
  if (a.size() != table.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!table[i].contains(a[i])) return false;
  }
  return true;
}

/// Per-characteristic change of a modified assignment against the original.
struct ChangeRecord {
  bool selected = false;
  double pc = 0.0;     // |v - v''| / |v|
  double delta = 0.0;  // v'' - v

  bool operator==(const ChangeRecord&) const = default;
};

inline std::vector<ChangeRecord> relative_changes(const Assignment& orig,
                                                  const Assignment& modified,
                                                  std::span<const std::string> names = {}) {
  require_same_length(orig.size(), modified.size(), "relative_changes");
  std::vector<ChangeRecord> out(orig.size());
  for (std::size_t i = 0; i < orig.size(); ++i) {
    if (orig[i] == 0.0) {
      std::string who = i < names.size() ? names[i] : "#" + std::to_string(i);
      throw InputError("relative_changes: original value of '" + who +
                       "' is zero (division by zero)");
    }
    if (modified[i] == orig[i]) continue;
    out[i].selected = true;
    out[i].delta = modified[i] - orig[i];
    out[i].pc = std::abs(out[i].delta) / std::abs(orig[i]);
  }
  return out;
}

}  // namespace vchar
