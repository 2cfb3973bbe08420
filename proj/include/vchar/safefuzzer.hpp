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

// Mutation-based fuzzer with windowed range and change-count adaptation.
//
// Generation 0 samples the full box. Every later candidate copies a parent
// (the previous generation, or the current top set once scoring is active),
// picks k in [1, maxNum] characteristics without replacement and redraws each
// uniformly in range_next. Every `window` generations the unsafe records of
// the window (safety degree below the original's) shrink range_next to the
// means of their increased and decreased filtered values and set maxNum to
// their mean change count.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "vchar/operators.hpp"
#include "vchar/search.hpp"

namespace vchar {

struct FuzzerState {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t max_num = 0;

  static FuzzerState initial(const Bounds& b) { return {b.lower, b.upper, b.size()}; }
  bool operator==(const FuzzerState&) const = default;
};

/// One candidate: `parent` with k in [1, max_num] distinct characteristics
/// redrawn uniformly within the state's ranges.
inline Assignment mutation_gen(const Assignment& parent, const FuzzerState& state, Rng& rng) {
  const std::size_t n = parent.size();
  require_same_length(n, state.lower.size(), "mutation_gen");
  Assignment out = parent;
  const std::size_t cap = std::clamp<std::size_t>(state.max_num, 1, n);
  const std::size_t k = 1 + static_cast<std::size_t>(rng.below(cap));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
    const auto c = idx[i];
    out[c] = rng.uniform(state.lower[c], state.upper[c]);
  }
  return out;
}

/// Window update. Unsafe records have safety_degree < baseline. Per
/// characteristic the upper bound becomes the mean of increased filtered
/// values and the lower bound the mean of decreased ones; sides with no
/// change fall back to the domain. maxNum becomes the rounded mean change
/// count, at least 1. No unsafe record leaves the state unchanged.
inline FuzzerState update_fuzzer_state(const FuzzerState& state, std::span<const EvaluationRecord> window,
                                       const Assignment& orig, const Bounds& domain, double baseline) {
  const std::size_t n = orig.size();
  std::vector<double> inc_sum(n, 0.0), dec_sum(n, 0.0);
  std::vector<std::size_t> inc_n(n, 0), dec_n(n, 0);
  double count_sum = 0.0;
  std::size_t unsafe = 0;
  for (const auto& r : window) {
    if (!(r.safety.safety_degree < baseline)) continue;
    ++unsafe;
    count_sum += r.objectives.f_num_diff;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = r.filtered[i];
      if (v > orig[i]) {
        inc_sum[i] += v;
        ++inc_n[i];
      } else if (v < orig[i]) {
        dec_sum[i] += v;
        ++dec_n[i];
      }
    }
  }
  if (unsafe == 0) return state;
  FuzzerState next;
  next.lower = domain.lower;
  next.upper = domain.upper;
  for (std::size_t i = 0; i < n; ++i) {
    if (inc_n[i] > 0) next.upper[i] = inc_sum[i] / static_cast<double>(inc_n[i]);
    if (dec_n[i] > 0) next.lower[i] = dec_sum[i] / static_cast<double>(dec_n[i]);
  }
  const auto mean = std::lround(count_sum / static_cast<double>(unsafe));
  next.max_num = std::clamp<std::size_t>(static_cast<std::size_t>(std::max<long>(mean, 1)), 1, n);
  return next;
}

/// Weighted min-max score, higher is better. Each objective maps its best
/// (smallest) value to 1 and its worst to 0; a zero-span objective scores 0.5.
inline std::vector<double> fuzzer_fitness_score(std::span<const EvaluationRecord> records,
                                                const std::array<double, 3>& weights) {
  const std::size_t n = records.size();
  std::vector<double> score(n, 0.5);
  if (n < 2) return score;
  const double wsum = weights[0] + weights[1] + weights[2];
  std::array<double, 3> lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& r : records) {
    const auto p = r.objectives.as_array();
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = records[i].objectives.as_array();
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double span = hi[k] - lo[k];
      const double norm = span > 0.0 ? (hi[k] - p[k]) / span : 0.5;
      s += weights[k] / wsum * norm;
    }
    score[i] = s;
  }
  return score;
}

/// Indices of the `k` highest scores, ties to the lower index, ascending.
inline std::vector<std::size_t> top_scored(std::span<const double> scores, std::size_t k) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return scores[a] != scores[b] ? scores[a] > scores[b] : a < b; });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Signals convergence once the observed top set repeats for `patience`
/// consecutive observations.
class ConvergenceTracker {
 public:
  explicit ConvergenceTracker(std::size_t patience) : patience_(patience) {}

  bool observe(const std::vector<std::size_t>& top) {
    if (has_previous_ && top == previous_) {
      ++stale_;
    } else {
      stale_ = 0;
    }
    previous_ = top;
    has_previous_ = true;
    return converged();
  }

  bool converged() const noexcept { return stale_ >= patience_; }
  std::size_t stale() const noexcept { return stale_; }

 private:
  std::size_t patience_;
  std::size_t stale_ = 0;
  bool has_previous_ = false;
  std::vector<std::size_t> previous_;
};

inline RunArchive run_safefuzzer(const SearchConfig& config, const EvaluationContext& ctx,
                                 const RunOptions& options = {}) {
  if (config.algorithm != Algorithm::safefuzzer) throw ConfigError("run_safefuzzer requires algorithm safefuzzer");
  validate_search_config(config);
  const auto bounds = Bounds::of(ctx.table);
  const auto orig = Assignment{ctx.table.originals()};
  RunArchive archive;
  archive.config = config;

  double baseline = 0.0;
  try {
    baseline = evaluate(orig, ctx).safety.safety_degree;
  } catch (const EvaluationError& e) {
    throw RunAborted(e, archive);
  }

  Rng rng(config.seed);
  EvaluationDispatcher dispatch(ctx, options, archive);
  FuzzerState state = FuzzerState::initial(bounds);
  ConvergenceTracker tracker(config.convergence_patience);
  std::vector<Assignment> parents;
  std::size_t window_start = 0;
  bool scoring = false;

  for (std::size_t gen = 0; dispatch.evaluations() < config.max_evaluations; ++gen) {
    const auto n = std::min(config.population_size, config.max_evaluations - dispatch.evaluations());
    std::vector<Assignment> batch;
    batch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (gen == 0) {
        batch.push_back(uniform_sample(bounds, rng));
      } else {
        const auto& parent = parents[rng.below(parents.size())];
        batch.push_back(mutation_gen(parent, state, rng));
      }
    }
    dispatch.evaluate_generation(batch, gen);
    const std::span<const EvaluationRecord> all(archive.evaluations);

    bool converged = false;
    if (dispatch.evaluations() > config.convergence_min_evaluations) {
      const auto scores = fuzzer_fitness_score(all, config.fuzzer_weights);
      const auto top = top_scored(scores, config.population_size);
      converged = tracker.observe(top);
      scoring = true;
      parents.clear();
      for (auto i : top) parents.push_back(all[i].raw);
    }
    if (!scoring) parents = batch;
    if ((gen + 1) % config.fuzzer_window_generations == 0) {
      state = update_fuzzer_state(state, all.subspan(window_start), orig, bounds, baseline);
      window_start = all.size();
    }
    if (converged) {
      archive.stop_reason = StopReason::converged;
      finalize_archive(archive);
      return archive;
    }
  }
  archive.stop_reason = StopReason::budget;
  finalize_archive(archive);
  return archive;
}

}  // namespace vchar
