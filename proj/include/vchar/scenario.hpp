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

// Scenario descriptions and the trace a simulation run produces.

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "vchar/error.hpp"

namespace vchar {

enum class ScenarioKind { pedestrian_crossing, lead_vehicle_stopped };
enum class Weather { sun, rain };

inline std::string to_string(ScenarioKind k) {
  return k == ScenarioKind::pedestrian_crossing ? "pedestrian-crossing" : "lead-vehicle-stopped";
}

inline std::string to_string(Weather w) { return w == Weather::sun ? "sun" : "rain"; }

inline ScenarioKind parse_scenario_kind(std::string_view s) {
  if (s == "pedestrian-crossing") return ScenarioKind::pedestrian_crossing;
  if (s == "lead-vehicle-stopped") return ScenarioKind::lead_vehicle_stopped;
  throw ConfigError("unknown scenario kind '" + std::string(s) + "'");
}

inline Weather parse_weather(std::string_view s) {
  if (s == "sun") return Weather::sun;
  if (s == "rain") return Weather::rain;
  throw ConfigError("unknown weather '" + std::string(s) + "'");
}

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::pedestrian_crossing;
  Weather weather = Weather::sun;
  double ego_initial_speed = 8.0;  // m/s
  double ego_target_speed = 8.0;   // m/s
  double initial_gap = 60.0;       // m, ego front bumper to conflict point
  double obstacle_speed = 1.4;     // m/s, lateral for pedestrians; 0 when parked
  double lane_width = 3.5;         // m
  double time_step = 0.01;         // s
  double horizon = 30.0;           // s
  double ttc_star = 1.5;           // s
  // Pedestrian geometry.
  double obstacle_lateral_offset = 5.0;  // m from lane centre at t = 0
  double obstacle_radius = 0.5;          // m
  double trigger_distance = 25.0;        // m, ego distance when the pedestrian enters the lane

  bool operator==(const ScenarioConfig&) const = default;
};

/// Pedestrian walks across the ego lane in front of a cruising vehicle.
inline ScenarioConfig pedestrian_crossing(Weather weather = Weather::sun) {
  ScenarioConfig s;
  s.weather = weather;
  return s;
}

/// Parked vehicle on the ego path; ego accelerates from rest.
inline ScenarioConfig lead_vehicle_stopped(Weather weather = Weather::sun) {
  ScenarioConfig s;
  s.kind = ScenarioKind::lead_vehicle_stopped;
  s.weather = weather;
  s.ego_initial_speed = 0.0;
  s.ego_target_speed = 12.0;
  s.initial_gap = 80.0;
  s.obstacle_speed = 0.0;
  s.ttc_star = 3.0;
  return s;
}

inline void validate_scenario(const ScenarioConfig& s) {
  auto bad = [](const char* what) { throw ConfigError(std::string("scenario: ") + what); };
  if (!(s.time_step > 0)) bad("time_step must be positive");
  if (!(s.horizon >= s.time_step)) bad("horizon must be at least one time_step");
  if (!(s.initial_gap > 0)) bad("initial_gap must be positive");
  if (!(s.ttc_star > 0)) bad("ttc_star must be positive");
  if (!(s.lane_width > 0)) bad("lane_width must be positive");
  if (s.ego_initial_speed < 0 || s.ego_target_speed < 0) bad("speeds must be nonnegative");
  if (s.obstacle_speed < 0) bad("obstacle_speed must be nonnegative");
  if (s.kind == ScenarioKind::pedestrian_crossing) {
    if (!(s.obstacle_speed > 0)) bad("pedestrian obstacle_speed must be positive");
    if (!(s.obstacle_radius > 0)) bad("obstacle_radius must be positive");
    if (!(s.ego_target_speed > 0)) bad("ego_target_speed must be positive");
    if (!(s.trigger_distance > 0 && s.trigger_distance < s.initial_gap)) {
      bad("trigger_distance must lie in (0, initial_gap)");
    }
  }
}

inline constexpr double kNoObstacle = std::numeric_limits<double>::infinity();

struct TrajectorySample {
  double t = 0.0;
  double ego_position = 0.0;
  double ego_speed = 0.0;
  double ego_accel = 0.0;                  // signed; negative while decelerating
  double obstacle_distance = kNoObstacle;  // longitudinal gap while the obstacle is in lane
  double relative_speed = 0.0;             // closing speed, positive when the gap shrinks
  bool brake_command = false;
  bool throttle_command = false;

  bool operator==(const TrajectorySample&) const = default;
};

struct SimulationTrace {
  std::vector<TrajectorySample> samples;
  bool collided = false;
  double collision_speed = 0.0;
  double min_distance = kNoObstacle;
  bool completed = false;

  bool operator==(const SimulationTrace&) const = default;
};

/// Throws IntegrityError when a trace contradicts its own invariants.
inline void check_trace_invariants(const SimulationTrace& trace, double time_step) {
  auto bad = [](const std::string& what) { throw IntegrityError("trace invariant violated: " + what); };
  if (std::isnan(trace.min_distance)) bad("min_distance is NaN");
  if (trace.collided != (trace.min_distance <= 0)) bad("collided must equal (min_distance <= 0)");
  if (!(trace.collision_speed >= 0)) bad("collision_speed must be nonnegative");
  if (trace.collision_speed > 0 && !trace.collided) bad("collision_speed > 0 without collision");
  double observed_min = kNoObstacle;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const auto& s = trace.samples[i];
    if (s.brake_command && s.throttle_command) {
      bad("brake and throttle both set at sample " + std::to_string(i));
    }
    if (i > 0) {
      const double dt = s.t - trace.samples[i - 1].t;
      if (!(dt > 0) || std::abs(dt - time_step) > 1e-9 * std::max(1.0, s.t)) {
        bad("sample times must advance by time_step at sample " + std::to_string(i));
      }
    }
    if (s.obstacle_distance < observed_min) observed_min = s.obstacle_distance;
  }
  if (!trace.samples.empty() && observed_min != trace.min_distance) {
    bad("min_distance disagrees with the samples");
  }
}

}  // namespace vchar
