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

// Run archives as newline-delimited JSON.
//
//   {"type":"header", ...}                  run configuration, table, scenario
//   {"type":"evaluation", ...}              one per evaluation, in dispatch order
//   {"type":"generation","generation":g,"evaluations":n}
//                                           after every complete generation
//   {"type":"trailer", ...}                 final front and stop reason
//   {"type":"failure", ...}                 instead of a trailer on abort
//
// A file without trailer or failure is a partial run; everything up to its
// last generation marker is reusable for resume.

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vchar/json_codec.hpp"
#include "vchar/search.hpp"

namespace vchar {

inline constexpr int kArchiveFormatVersion = 1;
inline constexpr const char* kArchiveFormat = "vchar-archive";

inline std::string to_string(SafetyObjective o) {
  switch (o) {
    case SafetyObjective::tet: return "tet";
    case SafetyObjective::tit: return "tit";
    case SafetyObjective::ave_dece: return "ave_dece";
    case SafetyObjective::safety_degree: break;
  }
  return "safety_degree";
}

inline SafetyObjective parse_safety_objective(std::string_view s) {
  if (s == "safety_degree") return SafetyObjective::safety_degree;
  if (s == "tet") return SafetyObjective::tet;
  if (s == "tit") return SafetyObjective::tit;
  if (s == "ave_dece") return SafetyObjective::ave_dece;
  throw ConfigError("unknown safety objective '" + std::string(s) + "'");
}

inline std::string table_hash(const CharacteristicTable& table) { return sha256_hex(to_json(table).dump()); }

inline json to_json(const SearchConfig& c) {
  json j{{"algorithm", to_string(c.algorithm)},
         {"population_size", c.population_size},
         {"max_evaluations", c.max_evaluations},
         {"crossover_rate", c.crossover_rate},
         {"crossover_distribution_index", c.crossover_distribution_index},
         {"mutation_rate", c.mutation_rate ? json(*c.mutation_rate) : json(nullptr)},
         {"mutation_distribution_index", c.mutation_distribution_index},
         {"seed", c.seed},
         {"fuzzer_weights", c.fuzzer_weights},
         {"fuzzer_window_generations", c.fuzzer_window_generations},
         {"convergence_min_evaluations", c.convergence_min_evaluations},
         {"convergence_patience", c.convergence_patience}};
  return j;
}

inline SearchConfig search_config_from_json(const json& j) {
  using namespace codec;
  const std::string p = "config.";
  SearchConfig c;
  try {
    c.algorithm = parse_algorithm(string(j, "algorithm", p));
    c.population_size = field(j, "population_size", p).get<std::size_t>();
    c.max_evaluations = field(j, "max_evaluations", p).get<std::size_t>();
    c.crossover_rate = number(j, "crossover_rate", p);
    c.crossover_distribution_index = number(j, "crossover_distribution_index", p);
    const auto& mr = field(j, "mutation_rate", p);
    if (!mr.is_null()) c.mutation_rate = mr.get<double>();
    c.mutation_distribution_index = number(j, "mutation_distribution_index", p);
    c.seed = field(j, "seed", p).get<std::uint64_t>();
    c.fuzzer_weights = field(j, "fuzzer_weights", p).get<std::array<double, 3>>();
    c.fuzzer_window_generations = field(j, "fuzzer_window_generations", p).get<std::size_t>();
    c.convergence_min_evaluations = field(j, "convergence_min_evaluations", p).get<std::size_t>();
    c.convergence_patience = field(j, "convergence_patience", p).get<std::size_t>();
  } catch (const json::exception& e) {
    throw ProtocolError(e.what(), "config");
  } catch (const ConfigError& e) {
    throw ProtocolError(e.what(), "config.algorithm");
  }
  return c;
}

inline json to_json(const PrecisionRule& r) {
  json bands = json::array();
  for (const auto& b : r.bands) {
    bands.push_back(json{{"min_width", b.min_width}, {"max_width", number_or_null(b.max_width)}, {"beta", b.beta}});
  }
  return bands;
}

inline PrecisionRule precision_from_json(const json& j) {
  if (!j.is_array()) throw ProtocolError("expected an array", "precision");
  PrecisionRule r;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = "precision[" + std::to_string(i) + "].";
    r.bands.push_back({codec::number(j[i], "min_width", p), codec::number(j[i], "max_width", p, true),
                       codec::number(j[i], "beta", p)});
  }
  return r;
}

inline json to_json(const SafetyRecord& s) {
  return json{{"safety_degree", s.safety_degree},
              {"tet", s.tet},
              {"tit", s.tit},
              {"ave_dece", s.ave_dece},
              {"ttc_star_used", s.ttc_star_used}};
}

inline SafetyRecord safety_from_json(const json& j, const std::string& p) {
  using namespace codec;
  return {number(j, "safety_degree", p), number(j, "tet", p), number(j, "tit", p), number(j, "ave_dece", p),
          number(j, "ttc_star_used", p)};
}

inline json to_json(const EvaluationRecord& r, std::size_t index) {
  return json{{"type", "evaluation"},
              {"index", index},
              {"generation", r.generation},
              {"raw", r.raw.values},
              {"filtered", r.filtered.values},
              {"objectives", {{"f_safe", r.objectives.f_safe},
                              {"f_diff", r.objectives.f_diff},
                              {"f_num_diff", r.objectives.f_num_diff}}},
              {"safety", to_json(r.safety)},
              {"collided", r.collided},
              {"trace_digest", r.trace_digest}};
}

inline EvaluationRecord evaluation_from_json(const json& j, const std::string& p) {
  using namespace codec;
  EvaluationRecord r;
  try {
    r.generation = field(j, "generation", p).get<std::size_t>();
    r.raw.values = field(j, "raw", p).get<std::vector<double>>();
    r.filtered.values = field(j, "filtered", p).get<std::vector<double>>();
    const auto& o = field(j, "objectives", p);
    r.objectives.f_safe = number(o, "f_safe", p + "objectives.");
    r.objectives.f_diff = number(o, "f_diff", p + "objectives.");
    r.objectives.f_num_diff = field(o, "f_num_diff", p + "objectives.").get<int>();
    r.safety = safety_from_json(field(j, "safety", p), p + "safety.");
    r.collided = boolean(j, "collided", p);
    r.trace_digest = string(j, "trace_digest", p);
  } catch (const json::exception& e) {
    throw ProtocolError(e.what(), p);
  }
  return r;
}

/// Identity of a run: everything needed to re-evaluate one of its records.
struct ArchiveHeader {
  SearchConfig config;
  CharacteristicTable table;
  ScenarioConfig scenario;
  SafetyObjective objective = SafetyObjective::safety_degree;
  PrecisionRule precision = default_precision_rule();
  std::string table_hash;

  json to_json() const {
    return json{{"type", "header"},
                {"format", kArchiveFormat},
                {"version", kArchiveFormatVersion},
                {"config", vchar::to_json(config)},
                {"table", vchar::to_json(table)},
                {"table_hash", table_hash},
                {"scenario", vchar::to_json(scenario)},
                {"objective", to_string(objective)},
                {"precision", vchar::to_json(precision)}};
  }

  bool operator==(const ArchiveHeader& o) const {
    return to_json() == o.to_json();
  }
};

inline ArchiveHeader make_header(const SearchConfig& config, const EvaluationContext& ctx,
                                 const PrecisionRule& precision) {
  return ArchiveHeader{config, ctx.table, ctx.scenario, ctx.objective, precision, table_hash(ctx.table)};
}

inline ArchiveHeader header_from_json(const json& j) {
  using namespace codec;
  if (string(j, "format", "header.") != kArchiveFormat) throw ProtocolError("not a run archive", "header.format");
  if (field(j, "version", "header.") != kArchiveFormatVersion) {
    throw ProtocolError("unsupported archive version", "header.version");
  }
  ArchiveHeader h;
  h.config = search_config_from_json(field(j, "config", "header."));
  h.table = table_from_json(field(j, "table", "header."));
  h.table_hash = string(j, "table_hash", "header.");
  h.scenario = scenario_from_json(field(j, "scenario", "header."));
  try {
    h.objective = parse_safety_objective(string(j, "objective", "header."));
  } catch (const ConfigError& e) {
    throw ProtocolError(e.what(), "header.objective");
  }
  h.precision = precision_from_json(field(j, "precision", "header."));
  if (table_hash(h.table) != h.table_hash) throw IntegrityError("archive header: table hash mismatch");
  return h;
}

struct ArchiveFailure {
  std::string message;
  Assignment raw;
};

struct LoadedArchive {
  ArchiveHeader header;
  RunArchive archive;
  bool complete = false;
  std::optional<ArchiveFailure> failure;
  // Evaluations covered by the last generation marker.
  std::size_t resumable_evaluations = 0;
};

/// Streams one run to disk. Each generation is flushed with its marker.
class ArchiveWriter {
 public:
  ArchiveWriter(const std::filesystem::path& path, const ArchiveHeader& header) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error("cannot write '" + path.string() + "'");
    line(header.to_json());
    out_.flush();
  }

  void append_generation(std::span<const EvaluationRecord> batch, std::size_t generation) {
    for (const auto& r : batch) line(to_json(r, written_++));
    line(json{{"type", "generation"}, {"generation", generation}, {"evaluations", written_}});
    out_.flush();
    if (!out_) throw Error("write failed on '" + path_.string() + "'");
  }

  void finish(const RunArchive& archive) {
    line(json{{"type", "trailer"},
              {"evaluations", archive.evaluations.size()},
              {"generations", archive.generations},
              {"stop_reason", to_string(archive.stop_reason)},
              {"final_front", archive.final_front}});
    close();
  }

  void fail(const std::string& message, const Assignment& raw) {
    line(json{{"type", "failure"}, {"message", message}, {"raw", raw.values}});
    close();
  }

  GenerationCallback callback() {
    return [this](std::span<const EvaluationRecord> batch, std::size_t g) { append_generation(batch, g); };
  }

 private:
  void line(const json& j) { out_ << j.dump() << '\n'; }
  void close() {
    out_.flush();
    if (!out_) throw Error("write failed on '" + path_.string() + "'");
    out_.close();
  }

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t written_ = 0;
};

/// Reads an archive. A truncated last line is tolerated when no trailer
/// follows; the run is then reported as partial.
inline LoadedArchive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  LoadedArchive out;
  std::string text;
  std::size_t lineno = 0;
  bool have_header = false;
  std::vector<EvaluationRecord> records;
  while (std::getline(in, text)) {
    ++lineno;
    const bool at_eof = in.eof();
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error&) {
      if (at_eof && !out.complete) break;  // interrupted write
      throw ParseError(path.string() + ": malformed JSON record", lineno, 1);
    }
    const std::string p = path.filename().string() + ":" + std::to_string(lineno) + ": ";
    try {
      const auto type = codec::string(j, "type");
      if (!have_header) {
        if (type != "header") throw ProtocolError("first record must be the header", "type");
        out.header = header_from_json(j);
        out.archive.config = out.header.config;
        have_header = true;
        continue;
      }
      if (out.complete || out.failure) throw ProtocolError("record after end of run", "type");
      if (type == "evaluation") {
        if (codec::field(j, "index") != records.size()) throw ProtocolError("evaluation out of order", "index");
        records.push_back(evaluation_from_json(j, ""));
      } else if (type == "generation") {
        if (codec::field(j, "evaluations") != records.size()) throw ProtocolError("marker count mismatch", "evaluations");
        out.resumable_evaluations = records.size();
        out.archive.generations = codec::field(j, "generation").get<std::size_t>() + 1;
      } else if (type == "trailer") {
        if (codec::field(j, "evaluations") != records.size()) throw ProtocolError("trailer count mismatch", "evaluations");
        out.archive.generations = codec::field(j, "generations").get<std::size_t>();
        const auto reason = codec::string(j, "stop_reason");
        if (reason != "budget" && reason != "converged") throw ProtocolError("unknown stop reason", "stop_reason");
        out.archive.stop_reason = reason == "budget" ? StopReason::budget : StopReason::converged;
        out.archive.final_front = codec::field(j, "final_front").get<std::vector<std::size_t>>();
        for (auto i : out.archive.final_front) {
          if (i >= records.size()) throw ProtocolError("front index out of range", "final_front");
        }
        out.complete = true;
      } else if (type == "failure") {
        out.failure = ArchiveFailure{codec::string(j, "message"),
                                     Assignment{codec::field(j, "raw").get<std::vector<double>>()}};
      } else {
        throw ProtocolError("unknown record type '" + type + "'", "type");
      }
    } catch (const ProtocolError& e) {
      throw ProtocolError(p + e.what(), e.field());
    } catch (const json::exception& e) {
      throw ProtocolError(p + e.what(), "");
    }
  }
  if (!have_header) throw ProtocolError(path.string() + ": empty archive", "header");
  if (!out.complete) records.resize(out.resumable_evaluations);
  out.archive.evaluations = std::move(records);
  if (!out.complete) finalize_archive(out.archive);
  return out;
}

}  // namespace vchar
