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

// Minimum-variation filter and the three search objectives.
//
// A candidate v' is mapped to its filtered version v'' by reverting every
// component whose change does not exceed the characteristic's threshold
// Th_i = beta * (u_i - l_i), beta chosen by the width of the domain. The
// objectives are then
//   f_safe     = safety metric of simulate(v'')
//   f_diff     = max_i |v_i - v''_i| / v_i
//   f_num_diff = #{i : v''_i != v_i}
// all minimised.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vchar/bridge.hpp"
#include "vchar/characteristics.hpp"
#include "vchar/hashing.hpp"
#include "vchar/safety_metrics.hpp"
#include "vchar/simulator.hpp"
#include "vchar/vehicle.hpp"

namespace vchar {

/// Piecewise precision table keyed on domain width: beta applies to widths in
/// [min_width, max_width).
struct PrecisionRule {
  struct Band {
    double min_width = 0.0;
    double max_width = 0.0;
    double beta = 0.0;
    bool operator==(const Band&) const = default;
  };
  std::vector<Band> bands;

  bool operator==(const PrecisionRule&) const = default;
};

inline PrecisionRule default_precision_rule() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return PrecisionRule{{{0.0, 1.0, 0.08}, {1.0, 100.0, 0.04}, {100.0, 1000.0, 0.02}, {1000.0, inf, 0.01}}};
}

/// Bands must be contiguous, ordered, and cover (0, +inf) with beta in (0, 1).
inline void validate_precision_rule(const PrecisionRule& rule) {
  if (rule.bands.empty()) throw ConfigError("precision rule: no bands");
  auto bands = rule.bands;
  std::sort(bands.begin(), bands.end(), [](const auto& a, const auto& b) { return a.min_width < b.min_width; });
  if (bands.front().min_width != 0.0) throw ConfigError("precision rule: first band must start at 0");
  if (!std::isinf(bands.back().max_width)) throw ConfigError("precision rule: last band must be unbounded");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (!(bands[i].beta > 0.0 && bands[i].beta < 1.0)) throw ConfigError("precision rule: beta outside (0, 1)");
    if (!(bands[i].max_width > bands[i].min_width)) throw ConfigError("precision rule: empty band");
    if (i > 0 && bands[i].min_width != bands[i - 1].max_width) {
      throw ConfigError("precision rule: bands must be contiguous and disjoint");
    }
  }
}

inline double precision_for_width(const PrecisionRule& rule, double width) {
  for (const auto& b : rule.bands) {
    if (width >= b.min_width && width < b.max_width && width > 0.0) return b.beta;
  }
  throw ConfigError("precision rule does not cover domain width " + std::to_string(width));
}

struct ThresholdVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const ThresholdVector&) const = default;
};

/// Th_i = beta * width, evaluated as (100 beta) percent of the width.
inline double threshold_for_width(double beta, double width) { return (beta * 100.0) * width / 100.0; }

inline ThresholdVector compute_thresholds(const CharacteristicTable& table, const PrecisionRule& rule) {
  ThresholdVector th;
  th.values.reserve(table.size());
  for (const auto& s : table.specs()) {
    try {
      th.values.push_back(threshold_for_width(precision_for_width(rule, s.width()), s.width()));
    } catch (const ConfigError& e) {
      throw ConfigError(s.name + ": " + e.what());
    }
  }
  return th;
}

/// Keeps v'_i where |v_i - v'_i| > Th_i, otherwise reverts to v_i.
inline Assignment apply_filter(const Assignment& raw, const Assignment& orig, const ThresholdVector& th) {
  require_same_length(raw.size(), orig.size(), "apply_filter");
  require_same_length(raw.size(), th.size(), "apply_filter");
  Assignment out = raw;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(std::abs(orig[i] - raw[i]) > th[i])) out[i] = orig[i];
  }
  return out;
}

struct ObjectiveVector {
  double f_safe = 0.0;
  double f_diff = 0.0;
  int f_num_diff = 0;

  std::array<double, 3> as_array() const { return {f_safe, f_diff, static_cast<double>(f_num_diff)}; }
  bool operator==(const ObjectiveVector&) const = default;
};

struct EvaluationRecord {
  Assignment raw;
  Assignment filtered;
  ObjectiveVector objectives;
  SafetyRecord safety;
  bool collided = false;
  std::string trace_digest;
  std::size_t generation = 0;

  bool operator==(const EvaluationRecord&) const = default;
};

/// Which safety measure drives f_safe. Exposure measures are negated so that
/// every variant is minimised towards less safe behaviour.
enum class SafetyObjective { safety_degree, tet, tit, ave_dece };

inline double f_safe_of(const SafetyRecord& r, SafetyObjective which) {
  switch (which) {
    case SafetyObjective::tet: return -r.tet;
    case SafetyObjective::tit: return -r.tit;
    case SafetyObjective::ave_dece: return r.ave_dece;
    case SafetyObjective::safety_degree: break;
  }
  return r.safety_degree;
}

using SimulatorBackend = std::function<SimulationTrace(const VehicleParams&, const ScenarioConfig&)>;

inline SimulatorBackend internal_backend() {
  return [](const VehicleParams& p, const ScenarioConfig& s) { return simulate(p, s); };
}

inline SimulatorBackend external_backend(Endpoint endpoint) {
  return [endpoint](const VehicleParams& p, const ScenarioConfig& s) { return run_external(endpoint, p, s); };
}

struct EvaluationContext {
  CharacteristicTable table;
  ThresholdVector thresholds;
  ScenarioConfig scenario;
  SimulatorBackend backend;
  SafetyObjective objective = SafetyObjective::safety_degree;

  static EvaluationContext make(CharacteristicTable table, ScenarioConfig scenario,
                                SimulatorBackend backend = internal_backend(),
                                const PrecisionRule& rule = default_precision_rule()) {
    require_valid(table);
    validate_scenario(scenario);
    validate_precision_rule(rule);
    EvaluationContext ctx;
    ctx.thresholds = compute_thresholds(table, rule);
    ctx.table = std::move(table);
    ctx.scenario = scenario;
    ctx.backend = std::move(backend);
    return ctx;
  }
};

/// A failed evaluation; carries the unfiltered candidate for replay.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, Assignment raw) : Error(what), raw_(std::move(raw)) {}
  const Assignment& raw() const noexcept { return raw_; }

 private:
  Assignment raw_;
};

inline ObjectiveVector compute_objectives(const Assignment& filtered, const Assignment& orig, double f_safe) {
  ObjectiveVector o;
  o.f_safe = f_safe;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    if (filtered[i] == orig[i]) continue;
    ++o.f_num_diff;
    o.f_diff = std::max(o.f_diff, std::abs(orig[i] - filtered[i]) / std::abs(orig[i]));
  }
  return o;
}

inline EvaluationRecord evaluate(const Assignment& raw, const EvaluationContext& ctx) {
  const auto orig = ctx.table.originals();
  EvaluationRecord rec;
  rec.raw = raw;
  try {
    rec.filtered = apply_filter(raw, orig, ctx.thresholds);
    const auto trace = ctx.backend(make_vehicle_params(ctx.table, rec.filtered), ctx.scenario);
    if (!std::isfinite(trace.min_distance)) {
      throw SimulationError("obstacle never entered the ego lane; safety degree undefined", trace.samples.size());
    }
    rec.safety = compute_safety_record(trace, ctx.scenario.ttc_star, ctx.scenario.time_step);
    rec.collided = trace.collided;
    rec.trace_digest = trace_digest(trace);
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(std::string("evaluation failed: ") + e.what(), raw);
  }
  rec.objectives = compute_objectives(rec.filtered, orig, f_safe_of(rec.safety, ctx.objective));
  return rec;
}

}  // namespace vchar
