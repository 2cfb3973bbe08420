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

// Rank-based two-sample tests: Mann-Whitney U and the Vargha-Delaney A12
// effect size.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vchar/error.hpp"

namespace vchar {

enum class MwuMethod { automatic, exact, normal };

struct MannWhitneyResult {
  double u = 0.0;  // U of the first sample
  double p = 1.0;  // two-sided
  MwuMethod method = MwuMethod::automatic;
};

namespace detail {

/// Mid-ranks of the pooled sample, doubled so they stay integral.
inline std::vector<std::int64_t> doubled_midranks(std::span<const double> pooled, std::vector<std::int64_t>* ties) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<std::int64_t> r2(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const auto doubled = static_cast<std::int64_t>(i + 1 + j + 1);  // 2 * mean of ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) r2[order[k]] = doubled;
    if (ties) ties->push_back(static_cast<std::int64_t>(j - i + 1));
    i = j + 1;
  }
  return r2;
}

}  // namespace detail

/// Two-sided Mann-Whitney U. `automatic` uses the exact null distribution of
/// the tie-aware rank sum when min(|a|, |b|) < 8, the normal approximation
/// with tie and continuity correction otherwise.
inline MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                        MwuMethod method = MwuMethod::automatic) {
  if (a.empty() || b.empty()) throw InputError("mann_whitney_u: empty sample");
  for (double x : a) if (!std::isfinite(x)) throw InputError("mann_whitney_u: non-finite value");
  for (double x : b) if (!std::isfinite(x)) throw InputError("mann_whitney_u: non-finite value");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t total = n + m;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::int64_t> ties;
  const auto r2 = detail::doubled_midranks(pooled, &ties);

  std::int64_t s2 = 0;
  for (std::size_t i = 0; i < n; ++i) s2 += r2[i];
  MannWhitneyResult res;
  const auto nn = static_cast<double>(n);
  const auto mm = static_cast<double>(m);
  res.u = static_cast<double>(s2) / 2.0 - nn * (nn + 1.0) / 2.0;
  if (method == MwuMethod::automatic) method = std::min(n, m) < 8 ? MwuMethod::exact : MwuMethod::normal;
  res.method = method;
  if (ties.size() == 1) {
    res.p = 1.0;
    return res;
  }

  if (method == MwuMethod::exact) {
    std::int64_t max_sum = 0;
    for (auto r : r2) max_sum += r;
    // ways[k][s]: subsets of size k with doubled rank sum s.
    std::vector<std::vector<double>> ways(n + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t i = 0; i < total; ++i) {
      const auto r = static_cast<std::size_t>(r2[i]);
      for (std::size_t k = std::min(n, i + 1); k >= 1; --k) {
        auto& dst = ways[k];
        const auto& src = ways[k - 1];
        for (std::size_t s = static_cast<std::size_t>(max_sum); s >= r; --s) {
          dst[s] += src[s - r];
          if (s == r) break;
        }
      }
    }
    // Doubled null mean of the rank sum is n * (N + 1).
    const auto centre = static_cast<std::int64_t>(n * (total + 1));
    const auto dev = std::llabs(s2 - centre);
    double hit = 0.0, all = 0.0;
    for (std::size_t s = 0; s < ways[n].size(); ++s) {
      const double w = ways[n][s];
      if (w == 0.0) continue;
      all += w;
      if (std::llabs(static_cast<std::int64_t>(s) - centre) >= dev) hit += w;
    }
    res.p = std::min(1.0, hit / all);
    return res;
  }

  const double big_n = nn + mm;
  double tie_term = 0.0;
  for (auto t : ties) {
    const auto td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double var = nn * mm / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
  if (!(var > 0.0)) {
    res.p = 1.0;
    return res;
  }
  const double z = std::max(0.0, std::abs(res.u - nn * mm / 2.0) - 0.5) / std::sqrt(var);
  res.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

/// P(X > Y) + 0.5 P(X = Y) for X from a, Y from b.
inline double vargha_delaney_a12(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("vargha_delaney_a12: empty sample");
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sb.begin(), sb.end());
  double wins = 0.0;
  for (double x : a) {
    const auto lo = std::lower_bound(sb.begin(), sb.end(), x);
    const auto hi = std::upper_bound(lo, sb.end(), x);
    wins += static_cast<double>(lo - sb.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

enum class EffectMagnitude { negligible, small, medium, large };

inline std::string to_string(EffectMagnitude m) {
  switch (m) {
    case EffectMagnitude::negligible: return "negligible";
    case EffectMagnitude::small: return "small";
    case EffectMagnitude::medium: return "medium";
    case EffectMagnitude::large: return "large";
  }
  return "?";
}

/// min(A12, 1 - A12).
inline double fold_a12(double a12) { return std::min(a12, 1.0 - a12); }

/// Bands on the folded value: large [0, 0.286], medium (0.286, 0.362],
/// small (0.362, 0.444], negligible above.
inline EffectMagnitude effect_magnitude(double a12) {
  const double f = fold_a12(a12);
  if (f <= 0.286) return EffectMagnitude::large;
  if (f <= 0.362) return EffectMagnitude::medium;
  if (f <= 0.444) return EffectMagnitude::small;
  return EffectMagnitude::negligible;
}

}  // namespace vchar
