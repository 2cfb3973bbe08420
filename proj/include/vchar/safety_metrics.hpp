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

// Surrogate safety measures computed from a simulation trace.

#include <cmath>
#include <span>
#include <vector>

#include "vchar/scenario.hpp"

namespace vchar {

struct SafetyRecord {
  double safety_degree = 0.0;  // m when safe, -m/s on collision
  double tet = 0.0;            // s
  double tit = 0.0;            // s^2
  double ave_dece = 0.0;       // m/s^2
  double ttc_star_used = 0.0;  // s

  bool operator==(const SafetyRecord&) const = default;
};

struct TtcPoint {
  double t = 0.0;
  double ttc = 0.0;

  bool operator==(const TtcPoint&) const = default;
};

/// Final minimum distance when it stays positive, else the negated collision speed.
inline double safety_degree(const SimulationTrace& trace) {
  return trace.min_distance > 0 ? trace.min_distance : -trace.collision_speed;
}

/// TTC = gap / closing speed for every sample with an in-lane obstacle on a
/// closing course; other samples are omitted.
inline std::vector<TtcPoint> ttc_series(const SimulationTrace& trace) {
  std::vector<TtcPoint> out;
  for (const auto& s : trace.samples) {
    if (!std::isfinite(s.obstacle_distance) || !(s.relative_speed > 0)) continue;
    out.push_back({s.t, s.obstacle_distance / s.relative_speed});
  }
  return out;
}

inline bool ttc_critical(double ttc, double ttc_star) { return ttc >= 0.0 && ttc <= ttc_star; }

/// Time exposed below the TTC threshold.
inline double tet(std::span<const TtcPoint> series, double ttc_star, double time_step) {
  double total = 0.0;
  for (const auto& p : series) {
    if (ttc_critical(p.ttc, ttc_star)) total += time_step;
  }
  return total;
}

/// Time-integrated shortfall below the TTC threshold.
inline double tit(std::span<const TtcPoint> series, double ttc_star, double time_step) {
  double total = 0.0;
  for (const auto& p : series) {
    if (ttc_critical(p.ttc, ttc_star)) total += (ttc_star - p.ttc) * time_step;
  }
  return total;
}

/// Mean |accel| over the first uninterrupted braking run (brake on, throttle
/// off); 0 when the controller never braked.
inline double ave_dece(const SimulationTrace& trace) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : trace.samples) {
    const bool braking = s.brake_command && !s.throttle_command;
    if (braking) {
      sum += std::abs(s.ego_accel);
      ++count;
    } else if (count > 0) {
      break;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

inline SafetyRecord compute_safety_record(const SimulationTrace& trace, double ttc_star, double time_step) {
  const auto series = ttc_series(trace);
  SafetyRecord r;
  r.safety_degree = safety_degree(trace);
  r.tet = tet(series, ttc_star, time_step);
  r.tit = tit(series, ttc_star, time_step);
  r.ave_dece = ave_dece(trace);
  r.ttc_star_used = ttc_star;
  return r;
}

}  // namespace vchar
