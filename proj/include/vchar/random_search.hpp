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

#include <algorithm>
#include <vector>

#include "vchar/operators.hpp"
#include "vchar/search.hpp"

namespace vchar {

/// Uniform sampling over the box, dispatched in batches of population_size.
inline RunArchive run_random_search(const SearchConfig& config, const EvaluationContext& ctx,
                                    const RunOptions& options = {}) {
  if (config.algorithm != Algorithm::random) throw ConfigError("run_random_search requires algorithm random");
  validate_search_config(config);
  const auto bounds = Bounds::of(ctx.table);
  Rng rng(config.seed);
  RunArchive archive;
  archive.config = config;
  EvaluationDispatcher dispatch(ctx, options, archive);

  for (std::size_t gen = 0; dispatch.evaluations() < config.max_evaluations; ++gen) {
    const auto n = std::min(config.population_size, config.max_evaluations - dispatch.evaluations());
    std::vector<Assignment> batch;
    batch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) batch.push_back(uniform_sample(bounds, rng));
    dispatch.evaluate_generation(batch, gen);
  }
  archive.stop_reason = StopReason::budget;
  finalize_archive(archive);
  return archive;
}

}  // namespace vchar
