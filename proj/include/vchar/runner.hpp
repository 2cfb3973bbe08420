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

// Plan execution. Output directory layout:
//
//   baseline.json                 evaluation of the original assignment
//   <algorithm>-seed<k>.jsonl     one complete archive per run
//   <algorithm>-seed<k>.jsonl.part
//                                 in-progress or failed run
//   manifest.json                 SHA-256 of every completed artifact
//
// A complete archive whose header matches the plan is reused as is. A
// partial archive is replayed up to its last generation marker and the run
// continues from there.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vchar/csv.hpp"
#include "vchar/engines.hpp"
#include "vchar/plan.hpp"

namespace vchar {

struct RunnerOptions {
  std::size_t parallel = 1;
  std::uint64_t seed_offset = 0;
  std::optional<BackendSpec> backend;
  std::ostream* log = nullptr;
  // Called after each generation is on disk; an exception stops the plan.
  std::function<void(const std::string& run, std::size_t generation)> after_generation;
};

struct RunOutcome {
  std::string name;
  Algorithm algorithm = Algorithm::nsga2;
  std::uint64_t seed = 0;
  std::filesystem::path path;
  bool ok = false;
  bool reused = false;
  std::size_t resumed_evaluations = 0;
  std::string error;
};

struct PlanResult {
  std::filesystem::path output_dir;
  std::filesystem::path baseline;
  std::filesystem::path manifest;
  std::vector<RunOutcome> runs;

  bool all_ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.ok; });
  }
};

inline std::string run_name(Algorithm a, std::uint64_t seed) { return to_string(a) + "-seed" + std::to_string(seed); }

struct Baseline {
  std::string table_hash;
  ScenarioConfig scenario;
  SafetyObjective objective = SafetyObjective::safety_degree;
  EvaluationRecord record;
};

inline json to_json(const Baseline& b) {
  auto rec = to_json(b.record, 0);
  rec.erase("type");
  rec.erase("index");
  rec.erase("generation");
  return json{{"type", "baseline"},
              {"table_hash", b.table_hash},
              {"scenario", to_json(b.scenario)},
              {"objective", to_string(b.objective)},
              {"record", rec}};
}

inline Baseline load_baseline(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 1, 1);
  }
  Baseline b;
  b.table_hash = codec::string(j, "table_hash");
  b.scenario = scenario_from_json(codec::field(j, "scenario"));
  b.objective = parse_safety_objective(codec::string(j, "objective"));
  auto rec = codec::field(j, "record");
  rec["generation"] = 0;
  b.record = evaluation_from_json(rec, "record.");
  return b;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw Error("write failed on '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline std::optional<LoadedArchive> try_load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    return load_archive(path);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline json manifest_entry(const std::filesystem::path& dir, const std::filesystem::path& file) {
  return json{{"path", std::filesystem::relative(file, dir).generic_string()},
              {"sha256", sha256_file(file)},
              {"bytes", std::filesystem::file_size(file)}};
}

inline PlanResult run_plan(const ExperimentPlan& plan, const RunnerOptions& options = {}) {
  namespace fs = std::filesystem;
  auto log = [&](const std::string& msg) {
    if (options.log) *options.log << msg << '\n';
  };
  PlanResult result;
  result.output_dir = plan.output_dir;
  fs::create_directories(plan.output_dir);

  const auto backend_spec = options.backend ? *options.backend : plan.backend;
  auto ctx = EvaluationContext::make(plan.table, plan.scenario, make_backend(backend_spec), plan.precision);
  ctx.objective = plan.objective;

  Baseline baseline{table_hash(plan.table), plan.scenario, plan.objective,
                    evaluate(Assignment{plan.table.originals()}, ctx)};
  result.baseline = plan.output_dir / "baseline.json";
  detail::write_text(result.baseline, to_json(baseline).dump(2) + "\n");
  log("baseline safety_degree " + csv::number(baseline.record.safety.safety_degree));

  for (const auto& proto : plan.algorithms) {
    for (const auto seed0 : plan.seeds) {
      SearchConfig config = proto;
      config.seed = seed0 + options.seed_offset;
      RunOutcome outcome;
      outcome.algorithm = config.algorithm;
      outcome.seed = config.seed;
      outcome.name = run_name(config.algorithm, config.seed);
      outcome.path = plan.output_dir / (outcome.name + ".jsonl");
      const auto part = fs::path(outcome.path.string() + ".part");
      const auto header = make_header(config, ctx, plan.precision);

      if (auto done = detail::try_load(outcome.path); done && done->complete && done->header == header) {
        outcome.ok = outcome.reused = true;
        log(outcome.name + ": complete, reused");
        result.runs.push_back(std::move(outcome));
        continue;
      }
      std::vector<EvaluationRecord> replay;
      if (auto partial = detail::try_load(part); partial && partial->header == header && !partial->failure) {
        replay = std::move(partial->archive.evaluations);
      }
      outcome.resumed_evaluations = replay.size();
      if (!replay.empty()) log(outcome.name + ": resuming after " + std::to_string(replay.size()) + " evaluations");

      ArchiveWriter writer(part, header);
      RunOptions run_options;
      run_options.parallel = options.parallel;
      run_options.replay = replay;
      run_options.on_generation = [&](std::span<const EvaluationRecord> batch, std::size_t g) {
        writer.append_generation(batch, g);
        if (options.after_generation) options.after_generation(outcome.name, g);
      };
      try {
        const auto archive = run_search(config, ctx, run_options);
        writer.finish(archive);
        fs::rename(part, outcome.path);
        outcome.ok = true;
        log(outcome.name + ": " + std::to_string(archive.evaluations.size()) + " evaluations, " +
            std::to_string(archive.final_front.size()) + " on the front (" + to_string(archive.stop_reason) + ")");
      } catch (const RunAborted& e) {
        writer.fail(e.what(), e.raw());
        if (fs::exists(outcome.path)) fs::remove(outcome.path);
        outcome.error = e.what();
        log(outcome.name + ": failed: " + outcome.error);
      }
      result.runs.push_back(std::move(outcome));
    }
  }

  json files = json::array();
  files.push_back(manifest_entry(plan.output_dir, result.baseline));
  json failures = json::array();
  for (const auto& r : result.runs) {
    if (r.ok) {
      files.push_back(manifest_entry(plan.output_dir, r.path));
    } else {
      failures.push_back(json{{"run", r.name}, {"error", r.error}});
    }
  }
  result.manifest = plan.output_dir / "manifest.json";
  detail::write_text(result.manifest,
                     json{{"plan", plan.name}, {"files", files}, {"failures", failures}}.dump(2) + "\n");
  return result;
}

/// Checks `file` against the manifest.json beside it.
inline void verify_against_manifest(const std::filesystem::path& file) {
  namespace fs = std::filesystem;
  const auto dir = file.parent_path().empty() ? fs::path(".") : file.parent_path();
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IntegrityError("no manifest.json beside '" + file.string() + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::parse_error&) {
    throw IntegrityError("malformed manifest '" + manifest_path.string() + "'");
  }
  const auto rel = fs::relative(file, dir).generic_string();
  for (const auto& e : m.value("files", json::array())) {
    if (e.value("path", "") != rel) continue;
    if (e.value("sha256", "") != sha256_file(file)) {
      throw IntegrityError("'" + file.string() + "' does not match its manifest hash");
    }
    return;
  }
  throw IntegrityError("'" + file.string() + "' is not listed in " + manifest_path.string());
}

struct ReplayResult {
  EvaluationRecord stored;
  EvaluationRecord fresh;
  bool match = false;
};

/// Re-evaluates record `index` of an archive under its recorded settings.
inline ReplayResult replay_record(const std::filesystem::path& archive_path, std::size_t index,
                                  const std::optional<BackendSpec>& backend = std::nullopt) {
  const auto loaded = load_archive(archive_path);
  if (index >= loaded.archive.evaluations.size()) {
    throw InputError("replay: index " + std::to_string(index) + " outside the archive's " +
                     std::to_string(loaded.archive.evaluations.size()) + " evaluations");
  }
  auto ctx = EvaluationContext::make(loaded.header.table, loaded.header.scenario,
                                     make_backend(backend ? *backend : BackendSpec{}), loaded.header.precision);
  ctx.objective = loaded.header.objective;
  ReplayResult r;
  r.stored = loaded.archive.evaluations[index];
  r.fresh = evaluate(r.stored.raw, ctx);
  r.fresh.generation = r.stored.generation;
  r.match = r.fresh == r.stored;
  return r;
}

}  // namespace vchar
