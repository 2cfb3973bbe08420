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
#include <numeric>
#include <vector>

#include "vchar/operators.hpp"
#include "vchar/search.hpp"

namespace vchar {

/// Ranks and crowds `pool`, then keeps the best `mu` by (rank, crowding
/// descending, archive index). Selected members carry the rank and crowding
/// computed over the whole pool.
inline std::vector<Individual> environmental_selection(std::vector<Individual> pool, std::size_t mu) {
  std::vector<std::array<double, 3>> pts;
  pts.reserve(pool.size());
  for (const auto& ind : pool) pts.push_back(ind.record.objectives.as_array());
  const auto fronts = fast_non_dominated_sort(pts);

  std::vector<Individual> out;
  out.reserve(std::min(mu, pool.size()));
  for (std::size_t r = 0; r < fronts.size() && out.size() < mu; ++r) {
    std::vector<std::array<double, 3>> front_pts;
    for (auto i : fronts[r]) front_pts.push_back(pts[i]);
    const auto crowd = crowding_distance(front_pts);
    std::vector<std::size_t> order(fronts[r].size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = 0; k < order.size(); ++k) {
      auto& ind = pool[fronts[r][k]];
      ind.rank = r;
      ind.crowding = crowd[k];
    }
    if (out.size() + order.size() > mu) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = pool[fronts[r][a]];
        const auto& y = pool[fronts[r][b]];
        if (x.crowding != y.crowding) return x.crowding > y.crowding;
        return x.archive_index < y.archive_index;
      });
      order.resize(mu - out.size());
    }
    for (auto k : order) out.push_back(pool[fronts[r][k]]);
  }
  return out;
}

/// Lower rank wins, then larger crowding, then lower archive index.
inline bool tournament_better(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  if (a.crowding != b.crowding) return a.crowding > b.crowding;
  return a.archive_index < b.archive_index;
}

inline const Individual& binary_tournament(const std::vector<Individual>& pop, Rng& rng) {
  if (pop.size() == 1) return pop.front();
  const auto i = rng.below(pop.size());
  auto j = rng.below(pop.size() - 1);
  if (j >= i) ++j;
  return tournament_better(pop[i], pop[j]) ? pop[i] : pop[j];
}

inline RunArchive run_nsga2(const SearchConfig& config, const EvaluationContext& ctx, const RunOptions& options = {}) {
  if (config.algorithm != Algorithm::nsga2) throw ConfigError("run_nsga2 requires algorithm nsga2");
  validate_search_config(config);
  const auto bounds = Bounds::of(ctx.table);
  const double pm = config.effective_mutation_rate(ctx.table.size());
  Rng rng(config.seed);
  RunArchive archive;
  archive.config = config;
  EvaluationDispatcher dispatch(ctx, options, archive);

  auto wrap = [&](const std::vector<Assignment>& raws, std::size_t generation) {
    const auto base = dispatch.evaluations();
    auto records = dispatch.evaluate_generation(raws, generation);
    std::vector<Individual> inds;
    inds.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      inds.push_back(Individual{raws[i], std::move(records[i]), base + i, 0, 0.0});
    }
    return inds;
  };

  std::vector<Assignment> initial;
  for (std::size_t i = 0; i < config.population_size; ++i) initial.push_back(uniform_sample(bounds, rng));
  auto population = environmental_selection(wrap(initial, 0), config.population_size);

  for (std::size_t gen = 1; dispatch.evaluations() < config.max_evaluations; ++gen) {
    const std::size_t want = std::min(config.population_size, config.max_evaluations - dispatch.evaluations());
    std::vector<Assignment> offspring;
    offspring.reserve(want + 1);
    while (offspring.size() < want) {
      const auto& p1 = binary_tournament(population, rng);
      const auto& p2 = binary_tournament(population, rng);
      auto [c1, c2] = sbx_crossover(p1.genotype, p2.genotype, bounds, config.crossover_rate,
                                    config.crossover_distribution_index, rng);
      offspring.push_back(polynomial_mutation(c1, bounds, pm, config.mutation_distribution_index, rng));
      offspring.push_back(polynomial_mutation(c2, bounds, pm, config.mutation_distribution_index, rng));
    }
    offspring.resize(want);
    auto children = wrap(offspring, gen);
    population.insert(population.end(), std::make_move_iterator(children.begin()),
                      std::make_move_iterator(children.end()));
    population = environmental_selection(std::move(population), config.population_size);
  }

  archive.stop_reason = StopReason::budget;
  finalize_archive(archive);
  return archive;
}

}  // namespace vchar
