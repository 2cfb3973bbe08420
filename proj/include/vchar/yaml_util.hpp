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

// Strict accessors over yaml-cpp nodes: unknown keys and type mismatches are
// reported with their source location.

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include "vchar/error.hpp"

namespace vchar::yaml {

inline std::string where(const YAML::Node& node) {
  const auto m = node.Mark();
  if (m.is_null()) return "";
  return " at line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1);
}

[[noreturn]] inline void fail(const YAML::Node& node, const std::string& what) {
  throw ConfigError(what + where(node));
}

inline YAML::Node load_file(const std::filesystem::path& path) {
  try {
    return YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot open '" + path.string() + "'");
  } catch (const YAML::ParserException& e) {
    throw ParseError(path.string() + ": " + e.msg, e.mark.line + 1, e.mark.column + 1);
  }
}

inline YAML::Node load_string(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
}

inline void require_map(const YAML::Node& node, std::string_view what) {
  if (!node.IsMap()) fail(node, std::string(what) + " must be a mapping");
}

inline void reject_unknown_keys(const YAML::Node& node, std::initializer_list<std::string_view> known,
                                std::string_view section) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) fail(kv.first, "unknown key '" + key + "' in " + std::string(section));
  }
}

template <typename T>
T as(const YAML::Node& node, std::string_view field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "field '" + std::string(field) + "' has the wrong type");
  }
}

template <typename T>
T required(const YAML::Node& parent, std::string_view key) {
  const auto node = parent[std::string(key)];
  if (!node) fail(parent, "missing required field '" + std::string(key) + "'");
  return as<T>(node, key);
}

template <typename T>
T optional(const YAML::Node& parent, std::string_view key, T fallback) {
  const auto node = parent[std::string(key)];
  if (!node) return fallback;
  return as<T>(node, key);
}

}  // namespace vchar::yaml
