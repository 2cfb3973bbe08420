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

// Slow reference computations used to check the library. None of them call
// into the code under test.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace vchar::testing {

using Point3 = std::array<double, 3>;

inline bool oracle_dominates(const Point3& a, const Point3& b) {
  bool no_worse = true;
  bool better = false;
  for (int k = 0; k < 3; ++k) {
    no_worse = no_worse && a[k] <= b[k];
    better = better || a[k] < b[k];
  }
  return no_worse && better;
}

/// Peels nondominated layers one at a time by pairwise checks.
inline std::vector<std::vector<std::size_t>> brute_force_layers(const std::vector<Point3>& pts) {
  std::vector<std::vector<std::size_t>> layers;
  std::vector<bool> taken(pts.size(), false);
  std::size_t left = pts.size();
  while (left > 0) {
    std::vector<std::size_t> layer;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (taken[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
        dominated = !taken[j] && j != i && oracle_dominates(pts[j], pts[i]);
      }
      if (!dominated) layer.push_back(i);
    }
    for (auto i : layer) taken[i] = true;
    left -= layer.size();
    layers.push_back(std::move(layer));
  }
  return layers;
}

inline std::vector<Point3> random_points(std::mt19937_64& gen, std::size_t n, bool integral) {
  std::vector<Point3> pts(n);
  std::uniform_int_distribution<int> small(0, 6);
  std::uniform_real_distribution<double> real(-5.0, 5.0);
  for (auto& p : pts) {
    for (auto& c : p) c = integral ? small(gen) : real(gen);
  }
  return pts;
}

/// Mean nearest normalised distance from each reference point to the front.
inline double igd_oracle(const std::vector<Point3>& front, const std::vector<Point3>& ref) {
  Point3 lo{}, hi{};
  for (int k = 0; k < 3; ++k) {
    lo[k] = std::numeric_limits<double>::infinity();
    hi[k] = -std::numeric_limits<double>::infinity();
    for (const auto& p : front) lo[k] = std::min(lo[k], p[k]), hi[k] = std::max(hi[k], p[k]);
    for (const auto& p : ref) lo[k] = std::min(lo[k], p[k]), hi[k] = std::max(hi[k], p[k]);
  }
  double sum = 0.0;
  for (const auto& r : ref) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : front) {
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double span = hi[k] - lo[k];
        if (span == 0.0) continue;
        const double d = (r[k] - lo[k]) / span - (f[k] - lo[k]) / span;
        d2 += d * d;
      }
      best = std::min(best, std::sqrt(d2));
    }
    sum += best;
  }
  return sum / static_cast<double>(ref.size());
}

/// Twice the Mann-Whitney U of `a` by pairwise counting.
inline std::int64_t doubled_u(const std::vector<double>& a, const std::vector<double>& b) {
  std::int64_t u2 = 0;
  for (double x : a) {
    for (double y : b) u2 += x > y ? 2 : (x == y ? 1 : 0);
  }
  return u2;
}

/// Two-sided exact p by enumerating every split of the pooled sample.
inline double permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = a.size();
  const std::size_t total = pooled.size();
  const std::int64_t centre = static_cast<std::int64_t>(a.size() * b.size());  // 2 * (n m / 2)
  const auto observed = std::llabs(doubled_u(a, b) - centre);
  double hit = 0.0, all = 0.0;
  std::vector<double> x, y;
  for (std::uint32_t mask = (1u << n) - 1; mask < (1u << total);) {
    x.clear();
    y.clear();
    for (std::size_t i = 0; i < total; ++i) ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
    all += 1.0;
    if (std::llabs(doubled_u(x, y) - centre) >= observed) hit += 1.0;
    const std::uint32_t c = mask & (~mask + 1u);
    const std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return hit / all;
}

inline double a12_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double wins = 0.0;
  for (double x : a) {
    for (double y : b) wins += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

inline std::vector<double> integer_sample(std::mt19937_64& gen, std::size_t n, int spread) {
  std::uniform_int_distribution<int> d(0, spread);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

}  // namespace vchar::testing
