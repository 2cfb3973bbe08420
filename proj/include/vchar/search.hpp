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

// Shared types for the search engines and the generation dispatcher that
// evaluates candidates (optionally in parallel) while keeping the archive in
// submission order.

#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "vchar/objectives.hpp"
#include "vchar/pareto.hpp"

namespace vchar {

enum class Algorithm { nsga2, random, safefuzzer };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::nsga2: return "nsga2";
    case Algorithm::random: return "random";
    case Algorithm::safefuzzer: return "safefuzzer";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "nsga2") return Algorithm::nsga2;
  if (s == "random") return Algorithm::random;
  if (s == "safefuzzer") return Algorithm::safefuzzer;
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

struct SearchConfig {
  Algorithm algorithm = Algorithm::nsga2;
  std::size_t population_size = 50;
  std::size_t max_evaluations = 5000;
  double crossover_rate = 0.9;
  double crossover_distribution_index = 20.0;
  std::optional<double> mutation_rate;  // unset: 1 / number of characteristics
  double mutation_distribution_index = 20.0;
  std::uint64_t seed = 0;

  // Fuzzer settings.
  std::array<double, 3> fuzzer_weights{6.0, 1.0, 1.0};
  std::size_t fuzzer_window_generations = 5;
  std::size_t convergence_min_evaluations = 500;
  std::size_t convergence_patience = 5;

  double effective_mutation_rate(std::size_t n) const {
    return mutation_rate ? *mutation_rate : 1.0 / static_cast<double>(n);
  }

  bool operator==(const SearchConfig&) const = default;
};

inline void validate_search_config(const SearchConfig& c) {
  auto bad = [](const std::string& what) { throw ConfigError("search config: " + what); };
  if (c.population_size == 0) bad("population_size must be positive");
  if (c.max_evaluations == 0) bad("max_evaluations must be positive");
  if (c.max_evaluations < c.population_size) bad("max_evaluations must be at least population_size");
  if (!(c.crossover_rate >= 0 && c.crossover_rate <= 1)) bad("crossover_rate must lie in [0, 1]");
  if (c.mutation_rate && !(*c.mutation_rate >= 0 && *c.mutation_rate <= 1)) bad("mutation_rate must lie in [0, 1]");
  if (!(c.crossover_distribution_index > 0)) bad("crossover_distribution_index must be positive");
  if (!(c.mutation_distribution_index > 0)) bad("mutation_distribution_index must be positive");
  for (double w : c.fuzzer_weights) {
    if (!(w >= 0)) bad("fuzzer weights must be nonnegative");
  }
  if (c.fuzzer_weights[0] + c.fuzzer_weights[1] + c.fuzzer_weights[2] <= 0) bad("fuzzer weights sum to zero");
  if (c.fuzzer_window_generations == 0) bad("fuzzer_window_generations must be positive");
  if (c.convergence_patience == 0) bad("convergence_patience must be positive");
}

struct Individual {
  Assignment genotype;
  EvaluationRecord record;
  std::size_t archive_index = 0;
  std::size_t rank = 0;
  double crowding = 0.0;
};

enum class StopReason { budget, converged };

inline std::string to_string(StopReason r) { return r == StopReason::budget ? "budget" : "converged"; }

struct RunArchive {
  SearchConfig config;
  std::vector<EvaluationRecord> evaluations;
  std::vector<std::size_t> final_front;  // indices into evaluations
  std::size_t generations = 0;
  StopReason stop_reason = StopReason::budget;

  std::vector<ObjectiveVector> final_front_points() const {
    std::vector<ObjectiveVector> out;
    for (auto i : final_front) out.push_back(evaluations[i].objectives);
    return out;
  }

  bool operator==(const RunArchive&) const = default;
};

inline std::vector<std::array<double, 3>> objective_points(std::span<const EvaluationRecord> records) {
  std::vector<std::array<double, 3>> pts;
  pts.reserve(records.size());
  for (const auto& r : records) pts.push_back(r.objectives.as_array());
  return pts;
}

inline void finalize_archive(RunArchive& archive) {
  archive.final_front = pareto_front_indices(objective_points(archive.evaluations));
}

using GenerationCallback = std::function<void(std::span<const EvaluationRecord> batch, std::size_t generation)>;

struct RunOptions {
  std::size_t parallel = 1;
  GenerationCallback on_generation;
  // Evaluations from an interrupted run; reused in order while they match.
  std::span<const EvaluationRecord> replay;
};

/// An engine stopped on an evaluation error; `partial` holds every complete
/// generation evaluated before the failure.
class RunAborted : public Error {
 public:
  RunAborted(const EvaluationError& cause, RunArchive partial)
      : Error(cause.what()), raw_(cause.raw()), partial_(std::move(partial)) {}

  const Assignment& raw() const noexcept { return raw_; }
  const RunArchive& partial() const noexcept { return partial_; }

 private:
  Assignment raw_;
  RunArchive partial_;
};

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The exception of
/// the lowest failing index is rethrown.
template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    const auto count = std::min(workers, n);
    pool.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Evaluates one generation at a time and appends it to the archive in
/// submission order.
class EvaluationDispatcher {
 public:
  EvaluationDispatcher(const EvaluationContext& ctx, const RunOptions& options, RunArchive& archive)
      : ctx_(ctx), options_(options), archive_(archive) {}

  std::vector<EvaluationRecord> evaluate_generation(const std::vector<Assignment>& raws, std::size_t generation) {
    const std::size_t base = archive_.evaluations.size();
    std::vector<EvaluationRecord> out(raws.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < raws.size(); ++i) {
      const std::size_t g = base + i;
      if (replay_valid_ && g < options_.replay.size() && options_.replay[g].raw == raws[i] &&
          options_.replay[g].generation == generation) {
        out[i] = options_.replay[g];
      } else {
        replay_valid_ = false;
        pending.push_back(i);
      }
    }
    try {
      parallel_for(pending.size(), options_.parallel, [&](std::size_t k) {
        const auto i = pending[k];
        out[i] = evaluate(raws[i], ctx_);
        out[i].generation = generation;
      });
    } catch (const EvaluationError& e) {
      finalize_archive(archive_);
      throw RunAborted(e, archive_);
    }
    archive_.evaluations.insert(archive_.evaluations.end(), out.begin(), out.end());
    archive_.generations = generation + 1;
    if (options_.on_generation) options_.on_generation(out, generation);
    return out;
  }

  std::size_t evaluations() const noexcept { return archive_.evaluations.size(); }

 private:
  const EvaluationContext& ctx_;
  const RunOptions& options_;
  RunArchive& archive_;
  bool replay_valid_ = true;
};

}  // namespace vchar
