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

#include <filesystem>
#include <string>

#include "vchar/characteristics.hpp"
#include "vchar/yaml_util.hpp"

namespace vchar {

// Table file layout:
//
//   label: carla
//   characteristics:
//     - name: mass
//       unit: kg
//       original: 2404
//       lower: 2040
//       upper: 2700
inline CharacteristicTable parse_table(const YAML::Node& root) {
  yaml::require_map(root, "characteristic table");
  yaml::reject_unknown_keys(root, {"label", "characteristics"}, "characteristic table");
  const auto label = yaml::required<std::string>(root, "label");
  const auto list = root["characteristics"];
  if (!list || !list.IsSequence()) yaml::fail(root, "'characteristics' must be a sequence");

  std::vector<CharacteristicSpec> specs;
  for (const auto& node : list) {
    yaml::require_map(node, "characteristic");
    yaml::reject_unknown_keys(node, {"name", "unit", "original", "lower", "upper"},
                              "characteristic");
    CharacteristicSpec s;
    s.name = yaml::required<std::string>(node, "name");
    s.unit = yaml::optional<std::string>(node, "unit", "");
    s.original = yaml::required<double>(node, "original");
    s.lower = yaml::required<double>(node, "lower");
    s.upper = yaml::required<double>(node, "upper");
    specs.push_back(std::move(s));
  }
  CharacteristicTable table(label, std::move(specs));
  require_valid(table);
  return table;
}

inline CharacteristicTable load_table(const std::filesystem::path& path) {
  return parse_table(yaml::load_file(path));
}

inline CharacteristicTable parse_table_string(const std::string& text) {
  return parse_table(yaml::load_string(text));
}

}  // namespace vchar
