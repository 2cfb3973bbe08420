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

// JSON encoding for scenarios, traces and tables. Non-finite numbers are
// written as null and read back as +infinity.

#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"
#include "vchar/characteristics.hpp"
#include "vchar/error.hpp"
#include "vchar/scenario.hpp"

namespace vchar {

using json = nlohmann::json;

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

namespace codec {

inline const json& field(const json& obj, const char* name, const std::string& prefix = "") {
  auto it = obj.find(name);
  if (it == obj.end()) throw ProtocolError("missing required field", prefix + name);
  return *it;
}

inline double number(const json& obj, const char* name, const std::string& prefix = "",
                     bool null_is_infinity = false) {
  const auto& v = field(obj, name, prefix);
  if (v.is_null() && null_is_infinity) return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw ProtocolError("expected a number", prefix + name);
  return v.get<double>();
}

inline bool boolean(const json& obj, const char* name, const std::string& prefix = "") {
  const auto& v = field(obj, name, prefix);
  if (!v.is_boolean()) throw ProtocolError("expected a boolean", prefix + name);
  return v.get<bool>();
}

inline std::string string(const json& obj, const char* name, const std::string& prefix = "") {
  const auto& v = field(obj, name, prefix);
  if (!v.is_string()) throw ProtocolError("expected a string", prefix + name);
  return v.get<std::string>();
}

}  // namespace codec

inline json to_json(const ScenarioConfig& s) {
  return json{{"kind", to_string(s.kind)},
              {"weather", to_string(s.weather)},
              {"ego_initial_speed", s.ego_initial_speed},
              {"ego_target_speed", s.ego_target_speed},
              {"initial_gap", s.initial_gap},
              {"obstacle_speed", s.obstacle_speed},
              {"lane_width", s.lane_width},
              {"time_step", s.time_step},
              {"horizon", s.horizon},
              {"ttc_star", s.ttc_star},
              {"obstacle_lateral_offset", s.obstacle_lateral_offset},
              {"obstacle_radius", s.obstacle_radius},
              {"trigger_distance", s.trigger_distance}};
}

inline ScenarioConfig scenario_from_json(const json& j) {
  using namespace codec;
  const std::string p = "scenario.";
  ScenarioConfig s;
  try {
    s.kind = parse_scenario_kind(string(j, "kind", p));
    s.weather = parse_weather(string(j, "weather", p));
  } catch (const ConfigError& e) {
    throw ProtocolError(e.what(), p + "kind");
  }
  s.ego_initial_speed = number(j, "ego_initial_speed", p);
  s.ego_target_speed = number(j, "ego_target_speed", p);
  s.initial_gap = number(j, "initial_gap", p);
  s.obstacle_speed = number(j, "obstacle_speed", p);
  s.lane_width = number(j, "lane_width", p);
  s.time_step = number(j, "time_step", p);
  s.horizon = number(j, "horizon", p);
  s.ttc_star = number(j, "ttc_star", p);
  // Geometry extensions are optional on the wire.
  if (j.contains("obstacle_lateral_offset")) s.obstacle_lateral_offset = number(j, "obstacle_lateral_offset", p);
  if (j.contains("obstacle_radius")) s.obstacle_radius = number(j, "obstacle_radius", p);
  if (j.contains("trigger_distance")) s.trigger_distance = number(j, "trigger_distance", p);
  return s;
}

inline json to_json(const TrajectorySample& s) {
  return json{{"t", s.t},
              {"ego_position", s.ego_position},
              {"ego_speed", s.ego_speed},
              {"ego_accel", s.ego_accel},
              {"obstacle_distance", number_or_null(s.obstacle_distance)},
              {"relative_speed", s.relative_speed},
              {"brake_command", s.brake_command},
              {"throttle_command", s.throttle_command}};
}

inline json to_json(const SimulationTrace& t) {
  json samples = json::array();
  for (const auto& s : t.samples) samples.push_back(to_json(s));
  return json{{"samples", std::move(samples)},
              {"collided", t.collided},
              {"collision_speed", t.collision_speed},
              {"min_distance", number_or_null(t.min_distance)},
              {"completed", t.completed}};
}

/// Decodes a trace; unknown fields are ignored, missing ones raise ProtocolError.
inline SimulationTrace trace_from_json(const json& j) {
  using namespace codec;
  if (!j.is_object()) throw ProtocolError("expected an object", "response");
  SimulationTrace t;
  const auto& samples = field(j, "samples");
  if (!samples.is_array()) throw ProtocolError("expected an array", "samples");
  t.samples.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& e = samples[i];
    const std::string p = "samples[" + std::to_string(i) + "].";
    if (!e.is_object()) throw ProtocolError("expected an object", "samples[" + std::to_string(i) + "]");
    TrajectorySample s;
    s.t = number(e, "t", p);
    s.ego_position = number(e, "ego_position", p);
    s.ego_speed = number(e, "ego_speed", p);
    s.ego_accel = number(e, "ego_accel", p);
    s.obstacle_distance = number(e, "obstacle_distance", p, true);
    s.relative_speed = number(e, "relative_speed", p);
    s.brake_command = boolean(e, "brake_command", p);
    s.throttle_command = boolean(e, "throttle_command", p);
    t.samples.push_back(s);
  }
  t.collided = boolean(j, "collided");
  t.collision_speed = number(j, "collision_speed");
  t.min_distance = number(j, "min_distance", "", true);
  t.completed = boolean(j, "completed");
  return t;
}

inline json to_json(const CharacteristicTable& table) {
  json specs = json::array();
  for (const auto& s : table.specs()) {
    specs.push_back(json{{"name", s.name},
                         {"unit", s.unit},
                         {"original", s.original},
                         {"lower", s.lower},
                         {"upper", s.upper}});
  }
  return json{{"label", table.label()}, {"characteristics", std::move(specs)}};
}

inline CharacteristicTable table_from_json(const json& j) {
  using namespace codec;
  std::vector<CharacteristicSpec> specs;
  const auto& list = field(j, "characteristics", "table.");
  if (!list.is_array()) throw ProtocolError("expected an array", "table.characteristics");
  for (const auto& e : list) {
    CharacteristicSpec s;
    s.name = string(e, "name", "table.");
    s.unit = string(e, "unit", "table.");
    s.original = number(e, "original", "table.");
    s.lower = number(e, "lower", "table.");
    s.upper = number(e, "upper", "table.");
    specs.push_back(std::move(s));
  }
  return CharacteristicTable(string(j, "label", "table."), std::move(specs));
}

}  // namespace vchar
