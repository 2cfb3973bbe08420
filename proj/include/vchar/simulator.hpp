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

// Deterministic point-mass longitudinal simulator with an embedded
// emergency-braking controller.
//
// Integration is forward Euler at the scenario time step. Forces:
//   drive = throttle * min(P / max(v, v_floor), mu * m * g), zero during a gear shift
//   brake = min(4 * T_brake / r, mu * m * g)
//   drag  = 0.5 * (rho * A) * Cd * v^2
// The controller cruises towards the target speed and commits to a full
// brake when the obstacle is in lane with TTC < 2 s or gap < 8 m. The brake
// engages after the actuation latency; it is released once the lane clears.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "vchar/scenario.hpp"
#include "vchar/vehicle.hpp"

namespace vchar {

struct SimulatorConstants {
  static constexpr double gravity = 9.81;
  static constexpr double air_density_area = 2.5;  // kg/m
  static constexpr double reaction_time = 1.0;     // s, before latency scaling
  static constexpr double rain_friction_factor = 0.7;
  static constexpr double rain_perception_delay = 0.15;  // s
  static constexpr double brake_ttc = 2.0;               // s
  static constexpr double brake_distance = 8.0;          // m
  static constexpr double nominal_power = 60e3;          // W at the original max_rpm
  static constexpr double traction_speed_floor = 5.0;    // m/s
  static constexpr double throttle_gain = 0.5;           // per m/s of speed error
  static constexpr double ego_length = 4.8;              // m
  static constexpr std::array<double, 4> shift_speeds{4.0, 8.0, 13.0, 19.0};
};

inline double effective_friction(const VehicleParams& p, Weather w) {
  return p.tire_friction * (w == Weather::rain ? SimulatorConstants::rain_friction_factor : 1.0);
}

/// Deceleration magnitude of a full brake, ignoring drag.
inline double full_brake_deceleration(const VehicleParams& p, Weather w) {
  const double torque_limited = 4.0 * p.max_brake_torque / (p.wheel_radius * p.mass);
  return std::min(torque_limited, effective_friction(p, w) * SimulatorConstants::gravity);
}

/// Total delay between the brake decision and brake engagement.
inline double brake_latency(const VehicleParams& p, Weather w) {
  return SimulatorConstants::reaction_time * p.latency_scale +
         (w == Weather::rain ? SimulatorConstants::rain_perception_delay : 0.0);
}

namespace detail {

struct ObstacleView {
  bool relevant = false;  // in the ego lane and not yet passed
  double gap = kNoObstacle;
  bool cleared = false;   // conflict resolved: pedestrian out of lane, or ego past it
};

class PedestrianScript {
 public:
  explicit PedestrianScript(const ScenarioConfig& s) : s_(s) {
    half_occupied_ = 0.5 * s.lane_width + s.obstacle_radius;
    const double t_enter = (s.initial_gap - s.trigger_distance) / s.ego_target_speed;
    const double walk = std::max(0.0, s.obstacle_lateral_offset - half_occupied_);
    start_time_ = std::max(0.0, t_enter - walk / s.obstacle_speed);
  }

  ObstacleView at(double t, double ego_front) const {
    const double y = s_.obstacle_lateral_offset - s_.obstacle_speed * std::max(0.0, t - start_time_);
    const double gap = s_.initial_gap - s_.obstacle_radius - ego_front;
    const double passed = -(SimulatorConstants::ego_length + 2.0 * s_.obstacle_radius);
    ObstacleView v;
    const bool in_lane = std::abs(y) <= half_occupied_;
    v.relevant = in_lane && gap > passed;
    v.gap = v.relevant ? gap : kNoObstacle;
    v.cleared = y < -half_occupied_ || gap <= passed;
    return v;
  }

 private:
  ScenarioConfig s_;
  double half_occupied_ = 0.0;
  double start_time_ = 0.0;
};

enum class Phase { cruise, pending, braking, holding };

inline void check_finite(double x, double v, std::size_t step) {
  if (!std::isfinite(x) || !std::isfinite(v)) {
    throw SimulationError("simulation diverged (non-finite ego state)", step);
  }
}

}  // namespace detail

inline SimulationTrace simulate(const VehicleParams& params, const ScenarioConfig& scenario) {
  using C = SimulatorConstants;
  validate_scenario(scenario);
  const double dt = scenario.time_step;
  const auto steps = static_cast<std::size_t>(std::floor(scenario.horizon / dt + 1e-9));
  const double mu = effective_friction(params, scenario.weather);
  const double traction = mu * params.mass * C::gravity;
  const double brake_force = std::min(4.0 * params.max_brake_torque / params.wheel_radius, traction);
  const double power = C::nominal_power * params.power_scale;
  const auto latency_steps =
      static_cast<std::size_t>(std::lround(brake_latency(params, scenario.weather) / dt));
  const auto shift_steps =
      static_cast<std::size_t>(std::lround(params.gear_shift_time * params.latency_scale / dt));
  const detail::PedestrianScript pedestrian(scenario);

  SimulationTrace trace;
  trace.samples.reserve(steps + 1);
  double x = 0.0;
  double v = scenario.ego_initial_speed;
  auto phase = detail::Phase::cruise;
  std::size_t brake_step = 0;
  std::size_t shift_until = 0;

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    detail::ObstacleView ob;
    if (scenario.kind == ScenarioKind::pedestrian_crossing) {
      ob = pedestrian.at(t, x);
    } else {
      ob.relevant = true;
      ob.gap = scenario.initial_gap - x;
    }
    const double closing = v;  // obstacles have no longitudinal motion

    TrajectorySample s;
    s.t = t;
    s.ego_position = x;
    s.ego_speed = v;
    s.obstacle_distance = ob.gap;
    s.relative_speed = ob.relevant ? closing : 0.0;

    if (ob.relevant && ob.gap <= 0.0) {
      trace.samples.push_back(s);
      trace.collided = true;
      trace.collision_speed = std::max(0.0, closing);
      break;
    }

    const bool danger =
        ob.relevant && ((closing > 0 && ob.gap / closing < C::brake_ttc) || ob.gap < C::brake_distance);
    switch (phase) {
      case detail::Phase::cruise:
        if (danger) {
          phase = detail::Phase::pending;
          brake_step = k + latency_steps;
        }
        break;
      case detail::Phase::pending:
      case detail::Phase::braking:
      case detail::Phase::holding:
        if (!ob.relevant) phase = detail::Phase::cruise;
        break;
    }
    if (phase == detail::Phase::pending && k >= brake_step) phase = detail::Phase::braking;
    if (phase == detail::Phase::braking && v <= 0.0) phase = detail::Phase::holding;

    double drive = 0.0;
    double brake = 0.0;
    if (phase == detail::Phase::braking) {
      s.brake_command = true;
      brake = brake_force;
    } else if (phase != detail::Phase::holding) {
      const double level = std::clamp(C::throttle_gain * (scenario.ego_target_speed - v), 0.0, 1.0);
      s.throttle_command = level > 0.0;
      if (k >= shift_until) {
        drive = level * std::min(power / std::max(v, C::traction_speed_floor), traction);
      }
    }
    const double drag = 0.5 * C::air_density_area * params.drag_coefficient * v * v;
    double a = (drive - brake - drag) / params.mass;
    if (v <= 0.0 && a < 0.0) a = 0.0;
    s.ego_accel = a;
    trace.samples.push_back(s);

    if (scenario.kind == ScenarioKind::pedestrian_crossing ? ob.cleared
                                                            : phase == detail::Phase::holding) {
      trace.completed = true;
      break;
    }

    const double v_next = std::max(0.0, v + a * dt);
    for (double shift : C::shift_speeds) {
      if (v < shift && v_next >= shift) shift_until = k + 1 + shift_steps;
    }
    x += v * dt;
    v = v_next;
    detail::check_finite(x, v, k + 1);
  }

  for (const auto& s : trace.samples) trace.min_distance = std::min(trace.min_distance, s.obstacle_distance);
  if (trace.collided) trace.min_distance = std::min(trace.min_distance, 0.0);
  return trace;
}

/// Full brake from `initial_speed` with no latency and no obstacle, run until
/// standstill or `max_time`.
inline SimulationTrace simulate_full_brake(const VehicleParams& params, double initial_speed,
                                           double time_step, Weather weather = Weather::sun,
                                           double max_time = 60.0) {
  using C = SimulatorConstants;
  const double traction = effective_friction(params, weather) * params.mass * C::gravity;
  const double brake_force = std::min(4.0 * params.max_brake_torque / params.wheel_radius, traction);
  SimulationTrace trace;
  double x = 0.0;
  double v = initial_speed;
  const auto steps = static_cast<std::size_t>(std::floor(max_time / time_step + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) {
    TrajectorySample s;
    s.t = static_cast<double>(k) * time_step;
    s.ego_position = x;
    s.ego_speed = v;
    if (v <= 0.0) {
      trace.samples.push_back(s);
      trace.completed = true;
      break;
    }
    s.brake_command = true;
    const double drag = 0.5 * C::air_density_area * params.drag_coefficient * v * v;
    s.ego_accel = -(brake_force + drag) / params.mass;
    trace.samples.push_back(s);
    x += v * time_step;
    v = std::max(0.0, v + s.ego_accel * time_step);
    detail::check_finite(x, v, k + 1);
  }
  return trace;
}

}  // namespace vchar
