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

// Aggregations over the unsafe solutions of a set of runs: change-count
// histograms, per-characteristic selection ranks, frequent combinations and
// signed value-change summaries.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vchar/search.hpp"

namespace vchar {

/// Records with safety_degree strictly below th_safe. `runs[i]` is the index
/// of the archive that produced `records[i]`.
struct UnsafeSet {
  std::vector<EvaluationRecord> records;
  std::vector<std::size_t> runs;
  double th_safe = 0.0;
  Assignment original;
  std::vector<std::string> names;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
};

/// Which records of a run are candidates for the unsafe set.
enum class UnsafeScope { final_front, all_evaluations };

inline std::string to_string(UnsafeScope s) { return s == UnsafeScope::final_front ? "final_front" : "all_evaluations"; }

inline UnsafeScope parse_unsafe_scope(std::string_view s) {
  if (s == "final_front") return UnsafeScope::final_front;
  if (s == "all_evaluations") return UnsafeScope::all_evaluations;
  throw ConfigError("unknown unsafe scope '" + std::string(s) + "'");
}

/// Unsafe records of every archive, deduplicated by filtered assignment
/// within each run and kept across runs.
inline UnsafeSet select_unsafe(std::span<const RunArchive> archives, double th_safe,
                               const CharacteristicTable& table, UnsafeScope scope = UnsafeScope::all_evaluations) {
  if (std::isnan(th_safe)) throw InputError("select_unsafe: threshold is NaN");
  UnsafeSet set;
  set.th_safe = th_safe;
  set.original = Assignment{table.originals()};
  set.names = table.names();
  for (std::size_t run = 0; run < archives.size(); ++run) {
    std::set<Assignment> seen;
    const auto& a = archives[run];
    std::vector<const EvaluationRecord*> pool;
    if (scope == UnsafeScope::final_front) {
      for (auto i : a.final_front) pool.push_back(&a.evaluations.at(i));
    } else {
      for (const auto& r : a.evaluations) pool.push_back(&r);
    }
    for (const auto* rp : pool) {
      const auto& r = *rp;
      if (!(r.safety.safety_degree < th_safe)) continue;
      require_same_length(r.filtered.size(), table.size(), "select_unsafe");
      if (!seen.insert(r.filtered).second) continue;
      set.records.push_back(r);
      set.runs.push_back(run);
    }
  }
  return set;
}

/// Characteristic indices changed by a record's filtered assignment.
inline std::vector<std::size_t> selected_characteristics(const EvaluationRecord& r, const Assignment& orig) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    if (r.filtered[i] != orig[i]) out.push_back(i);
  }
  return out;
}

/// counts[run][j - 1] = members of `run` with exactly j changes, j = 1..n.
inline std::vector<std::vector<std::size_t>> changed_count_histogram(const UnsafeSet& set, std::size_t run_count) {
  const std::size_t n = set.original.size();
  std::vector<std::vector<std::size_t>> counts(run_count, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto j = static_cast<std::size_t>(set.records[i].objectives.f_num_diff);
    if (set.runs[i] >= run_count) throw InputError("changed_count_histogram: run index out of range");
    if (j >= 1 && j <= n) ++counts[set.runs[i]][j - 1];
  }
  return counts;
}

/// Bucket with the largest pooled count; ties go to the smaller bucket.
/// Returns 0 when every bucket is empty.
inline std::size_t modal_bucket(const std::vector<std::vector<std::size_t>>& histogram) {
  std::vector<std::size_t> pooled;
  for (const auto& run : histogram) {
    if (pooled.size() < run.size()) pooled.resize(run.size(), 0);
    for (std::size_t j = 0; j < run.size(); ++j) pooled[j] += run[j];
  }
  std::size_t best = 0, best_count = 0;
  for (std::size_t j = 0; j < pooled.size(); ++j) {
    if (pooled[j] > best_count) {
      best_count = pooled[j];
      best = j + 1;
    }
  }
  return best;
}

struct RankRow {
  std::string name;
  std::vector<double> by_bucket;  // percent, j = 1..n
  double any = 0.0;               // percent over the whole set
  std::size_t rank = 0;           // competition ranking on `any`
};

struct RankTable {
  std::vector<RankRow> rows;  // characteristic order
  std::vector<std::size_t> bucket_sizes;
  std::size_t total = 0;

  const RankRow* find(std::string_view name) const {
    for (const auto& r : rows) {
      if (r.name == name) return &r;
    }
    return nullptr;
  }
};

inline RankTable selection_rank_table(const UnsafeSet& set) {
  const std::size_t n = set.original.size();
  RankTable t;
  t.total = set.size();
  t.bucket_sizes.assign(n, 0);
  std::vector<std::vector<std::size_t>> hits(n, std::vector<std::size_t>(n, 0));
  std::vector<std::size_t> any(n, 0);
  for (const auto& r : set.records) {
    const auto j = static_cast<std::size_t>(r.objectives.f_num_diff);
    const auto sel = selected_characteristics(r, set.original);
    for (auto c : sel) ++any[c];
    if (j < 1 || j > n) continue;
    ++t.bucket_sizes[j - 1];
    for (auto c : sel) ++hits[c][j - 1];
  }
  auto pct = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  for (std::size_t c = 0; c < n; ++c) {
    RankRow row;
    row.name = c < set.names.size() ? set.names[c] : "#" + std::to_string(c);
    for (std::size_t j = 0; j < n; ++j) row.by_bucket.push_back(pct(hits[c][j], t.bucket_sizes[j]));
    row.any = pct(any[c], t.total);
    row.rank = 1;
    for (std::size_t d = 0; d < n; ++d) {
      if (any[d] > any[c]) ++row.rank;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct Combination {
  std::vector<std::size_t> characteristics;
  std::vector<std::string> names;
  std::size_t count = 0;
  double percent = 0.0;  // of the j-bucket
};

/// The k most frequent selected-characteristic sets among members with
/// exactly j changes; ties ordered lexicographically by characteristic index.
inline std::vector<Combination> top_combinations(const UnsafeSet& set, std::size_t j, std::size_t k) {
  const std::size_t n = set.original.size();
  if (j < 1 || j > n) throw InputError("top_combinations: bucket outside 1..n");
  if (k < 1) throw InputError("top_combinations: k must be positive");
  std::map<std::vector<std::size_t>, std::size_t> freq;
  std::size_t bucket = 0;
  for (const auto& r : set.records) {
    if (static_cast<std::size_t>(r.objectives.f_num_diff) != j) continue;
    ++bucket;
    ++freq[selected_characteristics(r, set.original)];
  }
  std::vector<Combination> out;
  for (const auto& [chars, count] : freq) {
    Combination c;
    c.characteristics = chars;
    for (auto i : chars) c.names.push_back(i < set.names.size() ? set.names[i] : "#" + std::to_string(i));
    c.count = count;
    c.percent = 100.0 * static_cast<double>(count) / static_cast<double>(bucket);
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const Combination& a, const Combination& b) { return a.count > b.count; });
  if (out.size() > k) out.resize(k);
  return out;
}

struct SignedChange {
  std::size_t count = 0;
  double mean_pc = 0.0;  // fraction of |original|
  double mean_delta = 0.0;
};

struct ValueChangeCell {
  std::optional<SignedChange> positive;
  std::optional<SignedChange> negative;
};

struct MeanWithPercent {
  double mean = 0.0;
  double percent = 0.0;  // relative to the baseline value
};

struct BucketSummary {
  std::size_t bucket = 0;  // 0: all members
  std::size_t members = 0;
  std::vector<ValueChangeCell> cells;  // characteristic order
  std::optional<MeanWithPercent> avg_sd_md;  // Th_safe - safety_degree over non-collisions
  std::optional<double> avg_sd_cs;           // mean safety_degree (negated speed) over collisions
  std::optional<MeanWithPercent> tet_change;
  std::optional<MeanWithPercent> tit_change;
  std::optional<MeanWithPercent> ave_dece_change;  // baseline - member, so positive means softer braking
};

struct ValueChangeTable {
  std::vector<std::string> names;
  double th_safe = 0.0;
  std::vector<BucketSummary> buckets;  // j = 1..n
  BucketSummary overall;
};

namespace detail {

inline std::optional<MeanWithPercent> mean_change(const std::vector<double>& xs, double reference) {
  if (xs.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : xs) s += x;
  MeanWithPercent m;
  m.mean = s / static_cast<double>(xs.size());
  m.percent = reference != 0.0 ? 100.0 * m.mean / std::abs(reference) : 0.0;
  return m;
}

inline BucketSummary summarise_bucket(std::span<const EvaluationRecord* const> members, const UnsafeSet& set,
                                      const SafetyRecord& baseline, std::size_t bucket) {
  const std::size_t n = set.original.size();
  BucketSummary b;
  b.bucket = bucket;
  b.members = members.size();
  b.cells.resize(n);
  std::vector<SignedChange> pos(n), neg(n);
  std::vector<double> md, cs, tet, tit, dece;
  for (const auto* r : members) {
    const auto changes = relative_changes(set.original, r->filtered, set.names);
    for (std::size_t i = 0; i < n; ++i) {
      if (!changes[i].selected) continue;
      auto& acc = changes[i].delta > 0 ? pos[i] : neg[i];
      ++acc.count;
      acc.mean_pc += changes[i].pc;
      acc.mean_delta += changes[i].delta;
    }
    if (r->collided) {
      cs.push_back(r->safety.safety_degree);
    } else {
      md.push_back(set.th_safe - r->safety.safety_degree);
    }
    tet.push_back(r->safety.tet - baseline.tet);
    tit.push_back(r->safety.tit - baseline.tit);
    dece.push_back(baseline.ave_dece - r->safety.ave_dece);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (auto [acc, slot] : {std::pair{&pos[i], &b.cells[i].positive}, std::pair{&neg[i], &b.cells[i].negative}}) {
      if (acc->count == 0) continue;
      const auto c = static_cast<double>(acc->count);
      *slot = SignedChange{acc->count, acc->mean_pc / c, acc->mean_delta / c};
    }
  }
  b.avg_sd_md = mean_change(md, set.th_safe);
  if (!cs.empty()) {
    double s = 0.0;
    for (double x : cs) s += x;
    b.avg_sd_cs = s / static_cast<double>(cs.size());
  }
  b.tet_change = mean_change(tet, baseline.tet);
  b.tit_change = mean_change(tit, baseline.tit);
  b.ave_dece_change = mean_change(dece, baseline.ave_dece);
  return b;
}

}  // namespace detail

/// Signed value-change means per characteristic and j-bucket, with safety
/// deltas against the baseline record. Empty populations are absent.
inline ValueChangeTable value_change_table(const UnsafeSet& set, const SafetyRecord& baseline) {
  const std::size_t n = set.original.size();
  ValueChangeTable t;
  t.names = set.names;
  t.th_safe = set.th_safe;
  std::vector<std::vector<const EvaluationRecord*>> by_bucket(n);
  std::vector<const EvaluationRecord*> all;
  for (const auto& r : set.records) {
    all.push_back(&r);
    const auto j = static_cast<std::size_t>(r.objectives.f_num_diff);
    if (j >= 1 && j <= n) by_bucket[j - 1].push_back(&r);
  }
  for (std::size_t j = 0; j < n; ++j) t.buckets.push_back(detail::summarise_bucket(by_bucket[j], set, baseline, j + 1));
  t.overall = detail::summarise_bucket(all, set, baseline, 0);
  return t;
}

}  // namespace vchar
