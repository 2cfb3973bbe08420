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

// Experiment plans. Layout (paths relative to the plan file):
//
//   name: carla-sun
//   table: ../data/tables/carla.yaml
//   scenario: {kind: pedestrian-crossing, weather: sun, ttc_star: 1.5}
//   objective: safety_degree
//   search: {population_size: 50, max_evaluations: 5000}
//   algorithms: [nsga2, random, {algorithm: safefuzzer, population_size: 50}]
//   seeds: {first: 1, count: 30}          # or an explicit list
//   backend: internal                     # or {external: tcp://host:port, timeout: 60}
//   output_dir: ../runs/carla-sun

#include <algorithm>
#include <array>
#include <filesystem>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "vchar/archive_io.hpp"
#include "vchar/table_io.hpp"

namespace vchar {

struct ExternalBackend {
  Endpoint endpoint;
  double timeout = 60.0;  // s per simulation
};

using BackendSpec = std::variant<std::monostate, ExternalBackend>;  // monostate: internal

struct ExperimentPlan {
  std::string name;
  std::filesystem::path table_path;
  CharacteristicTable table;
  ScenarioConfig scenario;
  SafetyObjective objective = SafetyObjective::safety_degree;
  PrecisionRule precision = default_precision_rule();
  std::vector<SearchConfig> algorithms;  // seed field unused
  std::vector<std::uint64_t> seeds;
  BackendSpec backend;
  std::filesystem::path output_dir;
};

inline SimulatorBackend make_backend(const BackendSpec& spec) {
  if (const auto* ext = std::get_if<ExternalBackend>(&spec)) {
    const auto endpoint = ext->endpoint;
    const auto timeout = std::chrono::milliseconds(static_cast<long long>(ext->timeout * 1000.0));
    return [endpoint, timeout](const VehicleParams& p, const ScenarioConfig& s) {
      return run_external(endpoint, p, s, timeout);
    };
  }
  return internal_backend();
}

inline BackendSpec parse_backend_string(const std::string& text) {
  if (text == "internal") return std::monostate{};
  auto s = std::string_view(text);
  if (s.starts_with("external:")) s.remove_prefix(9);
  return ExternalBackend{Endpoint::parse(s)};
}

inline std::string to_string(const BackendSpec& b) {
  if (const auto* ext = std::get_if<ExternalBackend>(&b)) return "external:" + ext->endpoint.to_string();
  return "internal";
}

namespace detail {

inline long long positive_integer(const YAML::Node& node, std::string_view field) {
  const auto v = yaml::as<long long>(node, field);
  if (v <= 0) yaml::fail(node, std::string(field) + " must be positive");
  return v;
}

inline double fraction(const YAML::Node& node, std::string_view field) {
  const auto v = yaml::as<double>(node, field);
  if (!(v >= 0.0 && v <= 1.0)) yaml::fail(node, std::string(field) + " must lie in [0, 1]");
  return v;
}

inline double positive_real(const YAML::Node& node, std::string_view field) {
  const auto v = yaml::as<double>(node, field);
  if (!(v > 0.0) || !std::isfinite(v)) yaml::fail(node, std::string(field) + " must be positive");
  return v;
}

inline constexpr std::array<std::string_view, 10> kSearchKeys{
    "population_size", "max_evaluations", "crossover_rate", "crossover_distribution_index",
    "mutation_rate", "mutation_distribution_index", "fuzzer_weights", "fuzzer_window_generations",
    "convergence_min_evaluations", "convergence_patience"};

inline void apply_search_fields(const YAML::Node& node, SearchConfig& c, const std::string& section) {
  auto at = [&](const char* k) { return node[k]; };
  const auto f = [&](const char* k) { return section + "." + k; };
  if (auto n = at("population_size")) c.population_size = static_cast<std::size_t>(positive_integer(n, f("population_size")));
  if (auto n = at("max_evaluations")) c.max_evaluations = static_cast<std::size_t>(positive_integer(n, f("max_evaluations")));
  if (auto n = at("crossover_rate")) c.crossover_rate = fraction(n, f("crossover_rate"));
  if (auto n = at("crossover_distribution_index")) {
    c.crossover_distribution_index = positive_real(n, f("crossover_distribution_index"));
  }
  if (auto n = at("mutation_rate")) {
    if (n.IsScalar() && n.as<std::string>() == "auto") {
      c.mutation_rate.reset();
    } else {
      c.mutation_rate = fraction(n, f("mutation_rate"));
    }
  }
  if (auto n = at("mutation_distribution_index")) {
    c.mutation_distribution_index = positive_real(n, f("mutation_distribution_index"));
  }
  if (auto n = at("fuzzer_weights")) {
    if (!n.IsSequence() || n.size() != 3) yaml::fail(n, f("fuzzer_weights") + " must be a list of three numbers");
    for (std::size_t i = 0; i < 3; ++i) {
      c.fuzzer_weights[i] = yaml::as<double>(n[i], f("fuzzer_weights"));
      if (!(c.fuzzer_weights[i] >= 0)) yaml::fail(n[i], f("fuzzer_weights") + " must be nonnegative");
    }
  }
  if (auto n = at("fuzzer_window_generations")) {
    c.fuzzer_window_generations = static_cast<std::size_t>(positive_integer(n, f("fuzzer_window_generations")));
  }
  if (auto n = at("convergence_min_evaluations")) {
    const auto v = yaml::as<long long>(n, f("convergence_min_evaluations"));
    if (v < 0) yaml::fail(n, f("convergence_min_evaluations") + " must be nonnegative");
    c.convergence_min_evaluations = static_cast<std::size_t>(v);
  }
  if (auto n = at("convergence_patience")) {
    c.convergence_patience = static_cast<std::size_t>(positive_integer(n, f("convergence_patience")));
  }
}

inline ScenarioConfig parse_scenario(const YAML::Node& node) {
  yaml::require_map(node, "scenario");
  yaml::reject_unknown_keys(node,
                            {"kind", "weather", "ego_initial_speed", "ego_target_speed", "initial_gap",
                             "obstacle_speed", "lane_width", "time_step", "horizon", "ttc_star",
                             "obstacle_lateral_offset", "obstacle_radius", "trigger_distance"},
                            "scenario");
  ScenarioConfig s;
  try {
    const auto kind = parse_scenario_kind(yaml::optional<std::string>(node, "kind", "pedestrian-crossing"));
    const auto weather = parse_weather(yaml::optional<std::string>(node, "weather", "sun"));
    s = kind == ScenarioKind::pedestrian_crossing ? pedestrian_crossing(weather) : lead_vehicle_stopped(weather);
  } catch (const ConfigError& e) {
    yaml::fail(node, e.what());
  }
  auto num = [&](const char* key, double& slot) {
    if (auto n = node[key]) slot = yaml::as<double>(n, std::string("scenario.") + key);
  };
  num("ego_initial_speed", s.ego_initial_speed);
  num("ego_target_speed", s.ego_target_speed);
  num("initial_gap", s.initial_gap);
  num("obstacle_speed", s.obstacle_speed);
  num("lane_width", s.lane_width);
  num("time_step", s.time_step);
  num("horizon", s.horizon);
  num("ttc_star", s.ttc_star);
  num("obstacle_lateral_offset", s.obstacle_lateral_offset);
  num("obstacle_radius", s.obstacle_radius);
  num("trigger_distance", s.trigger_distance);
  try {
    validate_scenario(s);
  } catch (const ConfigError& e) {
    yaml::fail(node, e.what());
  }
  return s;
}

inline PrecisionRule parse_precision(const YAML::Node& node) {
  if (!node.IsSequence()) yaml::fail(node, "precision must be a list of bands");
  PrecisionRule r;
  for (const auto& b : node) {
    yaml::require_map(b, "precision band");
    yaml::reject_unknown_keys(b, {"min_width", "max_width", "beta"}, "precision band");
    PrecisionRule::Band band;
    band.min_width = yaml::required<double>(b, "min_width");
    const auto hi = b["max_width"];
    if (!hi) yaml::fail(b, "missing required field 'max_width'");
    const auto text = hi.as<std::string>();
    band.max_width = (text == "inf" || text == ".inf") ? std::numeric_limits<double>::infinity()
                                                       : yaml::as<double>(hi, "max_width");
    band.beta = yaml::required<double>(b, "beta");
    r.bands.push_back(band);
  }
  try {
    validate_precision_rule(r);
  } catch (const ConfigError& e) {
    yaml::fail(node, e.what());
  }
  return r;
}

inline std::vector<std::uint64_t> parse_seeds(const YAML::Node& node) {
  std::vector<std::uint64_t> seeds;
  if (node.IsSequence()) {
    for (const auto& s : node) {
      const auto v = yaml::as<long long>(s, "seeds");
      if (v < 0) yaml::fail(s, "seeds must be nonnegative");
      seeds.push_back(static_cast<std::uint64_t>(v));
    }
  } else if (node.IsMap()) {
    yaml::reject_unknown_keys(node, {"first", "count"}, "seeds");
    const auto first = yaml::required<long long>(node, "first");
    if (first < 0) yaml::fail(node, "seeds.first must be nonnegative");
    const auto count = positive_integer(node["count"] ? node["count"] : node, "seeds.count");
    for (long long i = 0; i < count; ++i) seeds.push_back(static_cast<std::uint64_t>(first + i));
  } else {
    yaml::fail(node, "seeds must be a list or {first, count}");
  }
  if (seeds.empty()) yaml::fail(node, "seeds must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    yaml::fail(node, "seeds unique: the seed list contains duplicates");
  }
  return seeds;
}

inline BackendSpec parse_backend(const YAML::Node& node) {
  if (node.IsScalar()) {
    const auto s = node.as<std::string>();
    if (s == "internal") return std::monostate{};
    yaml::fail(node, "backend must be 'internal' or {external: endpoint}");
  }
  yaml::require_map(node, "backend");
  yaml::reject_unknown_keys(node, {"external", "timeout"}, "backend");
  ExternalBackend ext;
  try {
    ext.endpoint = Endpoint::parse(yaml::required<std::string>(node, "external"));
  } catch (const ConfigError& e) {
    yaml::fail(node, e.what());
  }
  if (auto t = node["timeout"]) ext.timeout = positive_real(t, "backend.timeout");
  return ext;
}

}  // namespace detail

inline ExperimentPlan parse_plan_node(const YAML::Node& root, const std::filesystem::path& base_dir) {
  yaml::require_map(root, "plan");
  yaml::reject_unknown_keys(root,
                            {"name", "table", "scenario", "objective", "precision", "search", "algorithms", "seeds",
                             "backend", "output_dir"},
                            "plan");
  ExperimentPlan plan;
  plan.name = yaml::required<std::string>(root, "name");
  if (plan.name.empty()) yaml::fail(root["name"], "name must not be empty");

  plan.table_path = base_dir / yaml::required<std::string>(root, "table");
  try {
    plan.table = load_table(plan.table_path);
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& e) {
    yaml::fail(root["table"], std::string("table: ") + e.what());
  }

  plan.scenario = root["scenario"] ? detail::parse_scenario(root["scenario"]) : pedestrian_crossing();
  if (auto o = root["objective"]) {
    try {
      plan.objective = parse_safety_objective(yaml::as<std::string>(o, "objective"));
    } catch (const ConfigError& e) {
      yaml::fail(o, e.what());
    }
  }
  if (auto p = root["precision"]) plan.precision = detail::parse_precision(p);

  SearchConfig defaults;
  if (auto s = root["search"]) {
    yaml::require_map(s, "search");
    for (const auto& kv : s) {
      const auto key = kv.first.as<std::string>();
      if (std::find(detail::kSearchKeys.begin(), detail::kSearchKeys.end(), key) == detail::kSearchKeys.end()) {
        yaml::fail(kv.first, "unknown key '" + key + "' in search");
      }
    }
    detail::apply_search_fields(s, defaults, "search");
  }

  const auto algs = root["algorithms"];
  if (!algs || !algs.IsSequence() || algs.size() == 0) yaml::fail(root, "algorithms must be a nonempty list");
  std::set<Algorithm> seen;
  for (const auto& a : algs) {
    SearchConfig c = defaults;
    try {
      if (a.IsScalar()) {
        c.algorithm = parse_algorithm(a.as<std::string>());
      } else {
        yaml::require_map(a, "algorithm entry");
        const auto& keys = detail::kSearchKeys;
        for (const auto& kv : a) {
          const auto key = kv.first.as<std::string>();
          if (key != "algorithm" && std::find(keys.begin(), keys.end(), key) == keys.end()) {
            yaml::fail(kv.first, "unknown key '" + key + "' in algorithm entry");
          }
        }
        c.algorithm = parse_algorithm(yaml::required<std::string>(a, "algorithm"));
        detail::apply_search_fields(a, c, "algorithms." + to_string(c.algorithm));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const ConfigError& e) {
      if (std::string(e.what()).find(" at line ") != std::string::npos) throw;
      yaml::fail(a, e.what());
    }
    if (!seen.insert(c.algorithm).second) yaml::fail(a, "algorithms: duplicate entry '" + to_string(c.algorithm) + "'");
    try {
      validate_search_config(c);
    } catch (const ConfigError& e) {
      yaml::fail(a, e.what());
    }
    plan.algorithms.push_back(c);
  }

  const auto seeds = root["seeds"];
  if (!seeds) yaml::fail(root, "missing required field 'seeds'");
  plan.seeds = detail::parse_seeds(seeds);
  if (auto b = root["backend"]) plan.backend = detail::parse_backend(b);
  plan.output_dir = base_dir / yaml::required<std::string>(root, "output_dir");
  return plan;
}

inline ExperimentPlan parse_plan(const std::filesystem::path& file) {
  const auto root = yaml::load_file(file);
  return parse_plan_node(root, file.parent_path());
}

inline ExperimentPlan parse_plan_string(const std::string& text, const std::filesystem::path& base_dir) {
  return parse_plan_node(yaml::load_string(text), base_dir);
}

}  // namespace vchar
