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

// Maps a table-ordered assignment onto the quantities the longitudinal model
// consumes.
//
// mass, maxBrakeTorque, radius and tireFric drive the braking physics
// directly. Every other characteristic (including those that also have a
// physical role, such as dragCoeff and max_rpm) feeds a shared latency scale
// in [0.8, 1.2] that stretches the brake-actuation latency and gear-shift
// dead time. Each one contributes its normalised deviation from the
// original value, so every searched variable moves the outcome.

#include <string>
#include <string_view>
#include <vector>

#include "vchar/characteristics.hpp"

namespace vchar {

struct VehicleParams {
  // Raw characteristic values by name, in table order.
  std::vector<std::string> names;
  std::vector<double> values;

  double mass = 2404.0;               // kg
  double max_brake_torque = 1500.0;   // N*m
  double wheel_radius = 0.355;        // m
  double tire_friction = 3.5;         // dimensionless
  double drag_coefficient = 0.3;      // dimensionless
  double power_scale = 1.0;           // max_rpm relative to its original value
  double gear_shift_time = 0.5;       // s
  double latency_scale = 1.0;         // in [1 - kLatencySpan, 1 + kLatencySpan]

  static constexpr double kLatencySpan = 0.2;
  static constexpr double kDefaultTireFriction = 1.8;  // tables without tireFric

  bool operator==(const VehicleParams&) const = default;
};

inline double length_to_metres(double v, std::string_view unit) {
  if (unit == "cm") return v * 0.01;
  if (unit == "mm") return v * 0.001;
  return v;
}

namespace detail {

inline bool is_braking_characteristic(std::string_view name) {
  return name == "mass" || name == "maxBrakeTorque" || name == "radius" || name == "tireFric";
}

// Piecewise-linear deviation in [-1, 1]: -1 at the lower bound, 0 at the
// original value, +1 at the upper bound.
inline double normalised_deviation(const CharacteristicSpec& spec, double v) {
  if (v > spec.original) {
    const double side = spec.upper - spec.original;
    return side > 0 ? (v - spec.original) / side : 0.0;
  }
  if (v < spec.original) {
    const double side = spec.original - spec.lower;
    return side > 0 ? (v - spec.original) / side : 0.0;
  }
  return 0.0;
}

}  // namespace detail

/// Builds vehicle parameters from an in-bounds assignment.
inline VehicleParams make_vehicle_params(const CharacteristicTable& table, const Assignment& a) {
  require_same_length(a.size(), table.size(), "make_vehicle_params");
  if (!within_bounds(a, table)) {
    throw StructuralError("make_vehicle_params: assignment is not clamped to the table domains");
  }
  VehicleParams p;
  p.names = table.names();
  p.values = a.values;
  p.tire_friction = VehicleParams::kDefaultTireFriction;

  double deviation_sum = 0.0;
  std::size_t aux_count = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& spec = table[i];
    const double v = a[i];
    if (spec.name == "mass") {
      p.mass = v;
    } else if (spec.name == "maxBrakeTorque") {
      p.max_brake_torque = v;
    } else if (spec.name == "radius") {
      p.wheel_radius = length_to_metres(v, spec.unit);
    } else if (spec.name == "tireFric") {
      p.tire_friction = v;
    } else if (spec.name == "dragCoeff") {
      p.drag_coefficient = v;
    } else if (spec.name == "max_rpm") {
      p.power_scale = v / spec.original;
    } else if (spec.name == "gearSwitchTime" || spec.name == "shiftTime") {
      p.gear_shift_time = v;
    }
    if (!detail::is_braking_characteristic(spec.name)) {
      deviation_sum += detail::normalised_deviation(spec, v);
      ++aux_count;
    }
  }
  if (aux_count > 0) {
    p.latency_scale = 1.0 + VehicleParams::kLatencySpan * deviation_sum / static_cast<double>(aux_count);
  }
  return p;
}

}  // namespace vchar
