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

// Pareto dominance utilities for minimisation problems. Points are any
// random-access range of doubles of a common arity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <ranges>
#include <vector>

#include "vchar/error.hpp"

namespace vchar {

template <typename P>
concept ObjectivePoint = std::ranges::random_access_range<P> && std::ranges::sized_range<P> &&
                         std::convertible_to<std::ranges::range_value_t<P>, double>;

/// a dominates b: no worse everywhere and strictly better somewhere.
template <ObjectivePoint P>
bool dominates(const P& a, const P& b) {
  bool strictly = false;
  const auto m = std::ranges::size(a);
  for (std::size_t k = 0; k < m; ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strictly = true;
  }
  return strictly;
}

/// a weakly dominates b: no worse in every objective.
template <ObjectivePoint P>
bool weakly_dominates(const P& a, const P& b) {
  const auto m = std::ranges::size(a);
  for (std::size_t k = 0; k < m; ++k) {
    if (a[k] > b[k]) return false;
  }
  return true;
}

namespace detail {

template <ObjectivePoint P>
void check_points(const std::vector<P>& points) {
  if (points.empty()) return;
  const auto m = std::ranges::size(points.front());
  for (const auto& p : points) {
    if (std::ranges::size(p) != m) throw InputError("objective vectors have different arity");
    for (std::size_t k = 0; k < m; ++k) {
      if (!std::isfinite(static_cast<double>(p[k]))) throw InputError("non-finite objective component");
    }
  }
}

}  // namespace detail

/// Deb's fast non-dominated sort. Fronts list indices in ascending order.
template <ObjectivePoint P>
std::vector<std::vector<std::size_t>> fast_non_dominated_sort(const std::vector<P>& points) {
  detail::check_points(points);
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated_by_me(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  if (n == 0) return fronts;

  fronts.emplace_back();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(points[i], points[j])) {
        dominated_by_me[i].push_back(j);
        ++domination_count[j];
      } else if (dominates(points[j], points[i])) {
        dominated_by_me[j].push_back(i);
        ++domination_count[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (domination_count[i] == 0) fronts[0].push_back(i);
  }
  for (std::size_t f = 0; !fronts[f].empty(); ++f) {
    std::vector<std::size_t> next;
    for (auto i : fronts[f]) {
      for (auto j : dominated_by_me[i]) {
        if (--domination_count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

/// Crowding distance of each member of one front. Boundary points of every
/// objective are +inf; an objective with zero span contributes nothing.
template <ObjectivePoint P>
std::vector<double> crowding_distance(const std::vector<P>& front) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  const auto m = std::ranges::size(front.front());
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < m; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][k] < front[b][k]; });
    const double lo = front[order.front()][k];
    const double hi = front[order.back()][k];
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    const double span = hi - lo;
    if (span <= 0.0) continue;
    for (std::size_t r = 1; r + 1 < n; ++r) {
      if (std::isinf(dist[order[r]])) continue;
      dist[order[r]] += (front[order[r + 1]][k] - front[order[r - 1]][k]) / span;
    }
  }
  return dist;
}

/// Indices of the nondominated subset; duplicate points collapse to their
/// lowest index.
template <ObjectivePoint P>
std::vector<std::size_t> pareto_front_indices(const std::vector<P>& points) {
  detail::check_points(points);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < points.size() && keep; ++j) {
      if (j == i) continue;
      if (dominates(points[j], points[i])) keep = false;
      else if (j < i && weakly_dominates(points[i], points[j]) && weakly_dominates(points[j], points[i])) keep = false;
    }
    if (keep) out.push_back(i);
  }
  return out;
}

}  // namespace vchar
