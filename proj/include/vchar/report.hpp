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

// Report bundle over a set of completed archives. Files written to the
// output directory:
//
//   igd.csv                    algorithm, seed, front size, IGD vs the merged front
//   comparisons.csv            every algorithm pair on IGD and the per-run best safety metrics
//   baseline_comparisons.csv   each algorithm's per-run best metric vs the baseline value
//   rq3_<alg>_histogram.csv    unsafe solutions per run and change count
//   rq3_<alg>_ranks.csv        selection percentage per characteristic and change count
//   rq3_<alg>_combinations.csv most frequent characteristic sets per change count
//   rq3_<alg>_value_changes.csv signed mean relative and absolute changes
//   rq3_<alg>_safety_deltas.csv distance, collision speed and exposure deltas
//   summary.json               the same results in one document

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vchar/analysis.hpp"
#include "vchar/csv.hpp"
#include "vchar/quality.hpp"
#include "vchar/runner.hpp"
#include "vchar/statistics.hpp"

namespace vchar {

struct UseBaseline {};
using ThresholdSpec = std::variant<UseBaseline, double>;

struct ReportOptions {
  ThresholdSpec th_safe = UseBaseline{};
  UnsafeScope scope = UnsafeScope::all_evaluations;
  std::size_t top_k = 3;
  bool verify_manifest = true;
};

struct LoadedRun {
  std::filesystem::path path;
  ArchiveHeader header;
  RunArchive archive;
};

/// Per-run summary value of each metric, oriented so lower is less safe for
/// safety_degree and ave_dece and higher is less safe for tet and tit.
struct RunMetrics {
  double igd = 0.0;
  double safety_degree = 0.0;  // min
  double tet = 0.0;            // max
  double tit = 0.0;            // max
  double ave_dece = 0.0;       // min
};

inline RunMetrics best_metrics(const RunArchive& a) {
  RunMetrics m;
  if (a.evaluations.empty()) return m;
  m.safety_degree = m.ave_dece = std::numeric_limits<double>::infinity();
  m.tet = m.tit = -std::numeric_limits<double>::infinity();
  for (const auto& r : a.evaluations) {
    m.safety_degree = std::min(m.safety_degree, r.safety.safety_degree);
    m.tet = std::max(m.tet, r.safety.tet);
    m.tit = std::max(m.tit, r.safety.tit);
    m.ave_dece = std::min(m.ave_dece, r.safety.ave_dece);
  }
  return m;
}

inline double metric_of(const RunMetrics& m, std::string_view metric) {
  if (metric == "igd") return m.igd;
  if (metric == "safety_degree") return m.safety_degree;
  if (metric == "tet") return m.tet;
  if (metric == "tit") return m.tit;
  return m.ave_dece;
}

inline double metric_of(const SafetyRecord& s, std::string_view metric) {
  if (metric == "safety_degree") return s.safety_degree;
  if (metric == "tet") return s.tet;
  if (metric == "tit") return s.tit;
  return s.ave_dece;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Comparison {
  std::string metric;
  std::string a;
  std::string b;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double median_a = 0.0;
  double median_b = 0.0;
  MannWhitneyResult test;
  double a12 = 0.5;
};

inline Comparison compare_samples(std::string metric, std::string a, std::string b, const std::vector<double>& xs,
                                  const std::vector<double>& ys) {
  Comparison c;
  c.metric = std::move(metric);
  c.a = std::move(a);
  c.b = std::move(b);
  c.n_a = xs.size();
  c.n_b = ys.size();
  c.median_a = median(xs);
  c.median_b = median(ys);
  c.test = mann_whitney_u(xs, ys);
  c.a12 = vargha_delaney_a12(xs, ys);
  return c;
}

inline json to_json(const Comparison& c) {
  return json{{"metric", c.metric},       {"a", c.a},
              {"b", c.b},                 {"n_a", c.n_a},
              {"n_b", c.n_b},             {"median_a", c.median_a},
              {"median_b", c.median_b},   {"u", c.test.u},
              {"p_value", c.test.p},      {"a12", c.a12},
              {"one_minus_a12", 1.0 - c.a12}, {"magnitude", to_string(effect_magnitude(c.a12))},
              {"significant", c.test.p < 0.01}};
}

inline const std::vector<Algorithm>& canonical_algorithms() {
  static const std::vector<Algorithm> order{Algorithm::nsga2, Algorithm::random, Algorithm::safefuzzer};
  return order;
}

struct ReportBundle {
  json summary;
  std::map<std::string, csv::Table> tables;  // file name -> table

  void write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, t] : tables) t.write(dir / name);
    detail::write_text(dir / "summary.json", summary.dump(2) + "\n");
  }
};

inline std::vector<LoadedRun> load_runs(std::vector<std::filesystem::path> paths, bool verify) {
  if (paths.empty()) throw InputError("report: no archives given");
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  std::vector<LoadedRun> runs;
  for (const auto& p : paths) {
    if (verify) verify_against_manifest(p);
    auto loaded = load_archive(p);
    if (!loaded.complete) throw InputError("report: '" + p.string() + "' is not a complete archive");
    runs.push_back(LoadedRun{p, std::move(loaded.header), std::move(loaded.archive)});
  }
  const auto& first = runs.front().header;
  for (const auto& r : runs) {
    if (r.header.table_hash != first.table_hash) {
      throw InputError("report: incompatible archives: '" + r.path.string() + "' uses a different characteristic table");
    }
    if (!(r.header.scenario == first.scenario) || r.header.objective != first.objective) {
      throw InputError("report: incompatible archives: '" + r.path.string() + "' uses a different scenario");
    }
  }
  std::stable_sort(runs.begin(), runs.end(), [](const LoadedRun& a, const LoadedRun& b) {
    if (a.header.config.algorithm != b.header.config.algorithm) return a.header.config.algorithm < b.header.config.algorithm;
    return a.header.config.seed < b.header.config.seed;
  });
  return runs;
}

inline ReportBundle build_report(const std::vector<LoadedRun>& runs, const std::optional<Baseline>& baseline,
                                 const ReportOptions& options) {
  ReportBundle bundle;
  const auto& header = runs.front().header;
  const auto& table = header.table;
  const auto n = table.size();

  double th_safe = 0.0;
  if (std::holds_alternative<UseBaseline>(options.th_safe)) {
    if (!baseline) throw InputError("report: threshold 'baseline' needs baseline.json beside the archives");
    th_safe = baseline->record.safety.safety_degree;
  } else {
    th_safe = std::get<double>(options.th_safe);
  }
  if (baseline && baseline->table_hash != header.table_hash) {
    throw InputError("report: baseline.json was computed for a different characteristic table");
  }

  std::vector<RunArchive> archives;
  for (const auto& r : runs) archives.push_back(r.archive);
  const auto reference = build_reference_front(archives);

  std::map<Algorithm, std::vector<RunMetrics>> by_alg;
  csv::Table igd_table({"algorithm", "seed", "evaluations", "front_size", "igd"});
  json runs_json = json::array();
  for (const auto& r : runs) {
    auto m = best_metrics(r.archive);
    m.igd = igd(front_of(r.archive), reference);
    by_alg[r.header.config.algorithm].push_back(m);
    igd_table.row({to_string(r.header.config.algorithm), std::to_string(r.header.config.seed),
                   std::to_string(r.archive.evaluations.size()), std::to_string(r.archive.final_front.size()),
                   csv::number(m.igd)});
    runs_json.push_back(json{{"file", r.path.filename().string()},
                             {"algorithm", to_string(r.header.config.algorithm)},
                             {"seed", r.header.config.seed},
                             {"evaluations", r.archive.evaluations.size()},
                             {"front_size", r.archive.final_front.size()},
                             {"stop_reason", to_string(r.archive.stop_reason)},
                             {"igd", m.igd},
                             {"best_safety_degree", m.safety_degree},
                             {"best_tet", m.tet},
                             {"best_tit", m.tit},
                             {"best_ave_dece", m.ave_dece}});
  }
  bundle.tables.emplace("igd.csv", std::move(igd_table));

  static const std::vector<std::string> kMetrics{"igd", "safety_degree", "tet", "tit", "ave_dece"};
  const std::vector<std::string> comparison_header{"metric", "algorithm_a", "algorithm_b", "n_a", "n_b", "median_a",
                                                   "median_b", "u", "p_value", "a12", "one_minus_a12", "magnitude",
                                                   "significant"};
  auto comparison_row = [](const Comparison& c) {
    return std::vector<std::string>{c.metric,
                                    c.a,
                                    c.b,
                                    std::to_string(c.n_a),
                                    std::to_string(c.n_b),
                                    csv::number(c.median_a),
                                    csv::number(c.median_b),
                                    csv::number(c.test.u),
                                    csv::number(c.test.p),
                                    csv::number(c.a12),
                                    csv::number(1.0 - c.a12),
                                    to_string(effect_magnitude(c.a12)),
                                    c.test.p < 0.01 ? "true" : "false"};
  };

  std::vector<Algorithm> present;
  for (auto a : canonical_algorithms()) {
    if (by_alg.count(a)) present.push_back(a);
  }
  csv::Table cmp(comparison_header);
  json cmp_json = json::array();
  for (std::size_t i = 0; i < present.size(); ++i) {
    for (std::size_t j = i + 1; j < present.size(); ++j) {
      for (const auto& metric : kMetrics) {
        std::vector<double> xs, ys;
        for (const auto& m : by_alg[present[i]]) xs.push_back(metric_of(m, metric));
        for (const auto& m : by_alg[present[j]]) ys.push_back(metric_of(m, metric));
        const auto c = compare_samples(metric, to_string(present[i]), to_string(present[j]), xs, ys);
        cmp.row(comparison_row(c));
        cmp_json.push_back(to_json(c));
      }
    }
  }
  bundle.tables.emplace("comparisons.csv", std::move(cmp));

  csv::Table base_cmp(comparison_header);
  json base_json = json::array();
  if (baseline) {
    for (auto alg : present) {
      for (const auto& metric : kMetrics) {
        if (metric == "igd") continue;
        std::vector<double> xs;
        for (const auto& m : by_alg[alg]) xs.push_back(metric_of(m, metric));
        const std::vector<double> ys(xs.size(), metric_of(baseline->record.safety, metric));
        const auto c = compare_samples(metric, to_string(alg), "baseline", xs, ys);
        base_cmp.row(comparison_row(c));
        base_json.push_back(to_json(c));
      }
    }
  }
  bundle.tables.emplace("baseline_comparisons.csv", std::move(base_cmp));

  json rq3 = json::object();
  const auto names = table.names();
  for (auto alg : present) {
    std::vector<RunArchive> subset;
    std::vector<std::uint64_t> seeds;
    for (const auto& r : runs) {
      if (r.header.config.algorithm != alg) continue;
      subset.push_back(r.archive);
      seeds.push_back(r.header.config.seed);
    }
    const auto set = select_unsafe(subset, th_safe, table, options.scope);
    const auto prefix = "rq3_" + to_string(alg) + "_";

    std::vector<std::string> hist_header{"seed"};
    for (std::size_t j = 1; j <= n; ++j) hist_header.push_back("j" + std::to_string(j));
    csv::Table hist(hist_header);
    const auto counts = changed_count_histogram(set, subset.size());
    for (std::size_t r = 0; r < subset.size(); ++r) {
      std::vector<std::string> row{std::to_string(seeds[r])};
      for (auto c : counts[r]) row.push_back(std::to_string(c));
      hist.row(std::move(row));
    }
    bundle.tables.emplace(prefix + "histogram.csv", std::move(hist));

    const auto ranks = selection_rank_table(set);
    std::vector<std::string> rank_header{"characteristic"};
    for (std::size_t j = 1; j <= n; ++j) rank_header.push_back("j" + std::to_string(j));
    rank_header.push_back("any");
    rank_header.push_back("rank");
    csv::Table rank_csv(rank_header);
    json rank_json = json::array();
    for (const auto& row : ranks.rows) {
      std::vector<std::string> cells{row.name};
      for (double p : row.by_bucket) cells.push_back(csv::number(p));
      cells.push_back(csv::number(row.any));
      cells.push_back(std::to_string(row.rank));
      rank_csv.row(std::move(cells));
      rank_json.push_back(json{{"characteristic", row.name}, {"by_bucket", row.by_bucket}, {"any", row.any},
                               {"rank", row.rank}});
    }
    bundle.tables.emplace(prefix + "ranks.csv", std::move(rank_csv));

    csv::Table combos({"j", "position", "characteristics", "count", "percent"});
    for (std::size_t j = 1; j <= n; ++j) {
      std::size_t pos = 0;
      for (const auto& c : top_combinations(set, j, options.top_k)) {
        std::string joined;
        for (const auto& nm : c.names) joined += (joined.empty() ? "" : " + ") + nm;
        combos.row({std::to_string(j), std::to_string(++pos), joined, std::to_string(c.count), csv::number(c.percent)});
      }
    }
    bundle.tables.emplace(prefix + "combinations.csv", std::move(combos));

    if (baseline) {
      const auto vct = value_change_table(set, baseline->record.safety);
      csv::Table changes({"bucket", "characteristic", "sign", "count", "mean_pc_percent", "mean_delta"});
      csv::Table deltas({"bucket", "members", "avg_sd_md", "avg_sd_md_percent", "avg_sd_cs", "tet_change",
                         "tet_change_percent", "tit_change", "tit_change_percent", "ave_dece_change",
                         "ave_dece_change_percent"});
      auto emit = [&](const BucketSummary& b) {
        const auto label = b.bucket == 0 ? std::string("all") : std::to_string(b.bucket);
        for (std::size_t i = 0; i < b.cells.size(); ++i) {
          for (auto [sign, cell] : {std::pair{"+", &b.cells[i].positive}, std::pair{"-", &b.cells[i].negative}}) {
            if (!*cell) continue;
            changes.row({label, names[i], sign, std::to_string((*cell)->count), csv::number(100.0 * (*cell)->mean_pc),
                         csv::number((*cell)->mean_delta)});
          }
        }
        auto mean = [](const std::optional<MeanWithPercent>& m) {
          return m ? std::pair{csv::number(m->mean), csv::number(m->percent)} : std::pair{std::string(), std::string()};
        };
        const auto md = mean(b.avg_sd_md);
        const auto tet = mean(b.tet_change);
        const auto tit = mean(b.tit_change);
        const auto dece = mean(b.ave_dece_change);
        deltas.row({label, std::to_string(b.members), md.first, md.second, csv::number(b.avg_sd_cs), tet.first,
                    tet.second, tit.first, tit.second, dece.first, dece.second});
      };
      for (const auto& b : vct.buckets) emit(b);
      emit(vct.overall);
      bundle.tables.emplace(prefix + "value_changes.csv", std::move(changes));
      bundle.tables.emplace(prefix + "safety_deltas.csv", std::move(deltas));
    }

    std::vector<std::string> top3;
    for (const auto& row : ranks.rows) {
      if (row.rank <= 3) top3.push_back(row.name);
    }
    rq3[to_string(alg)] = json{{"unsafe_solutions", set.size()},
                               {"modal_bucket", modal_bucket(counts)},
                               {"top_ranked", top3},
                               {"ranks", rank_json}};
  }

  json igd_medians = json::object();
  for (auto alg : present) {
    std::vector<double> v;
    for (const auto& m : by_alg[alg]) v.push_back(m.igd);
    igd_medians[to_string(alg)] = median(v);
  }
  bundle.summary = json{{"th_safe", th_safe},
                        {"unsafe_scope", to_string(options.scope)},
                        {"table", table.label()},
                        {"table_hash", header.table_hash},
                        {"scenario", to_json(header.scenario)},
                        {"reference_front_size", reference.size()},
                        {"runs", runs_json},
                        {"igd_median", igd_medians},
                        {"comparisons", cmp_json},
                        {"baseline_comparisons", base_json},
                        {"rq3", rq3}};
  if (baseline) bundle.summary["baseline"] = to_json(baseline->record.safety);
  return bundle;
}

/// Loads, verifies and analyses `paths`; baseline.json is read from the
/// directory of the first archive.
inline ReportBundle report(std::vector<std::filesystem::path> paths, const ReportOptions& options = {}) {
  const auto runs = load_runs(std::move(paths), options.verify_manifest);
  std::optional<Baseline> baseline;
  const auto dir = runs.front().path.parent_path();
  const auto bpath = (dir.empty() ? std::filesystem::path(".") : dir) / "baseline.json";
  if (std::filesystem::exists(bpath)) {
    if (options.verify_manifest) verify_against_manifest(bpath);
    baseline = load_baseline(bpath);
  }
  return build_report(runs, baseline, options);
}

}  // namespace vchar
