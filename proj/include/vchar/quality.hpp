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
#include <array>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vchar/search.hpp"

namespace vchar {

struct Provenance {
  std::string algorithm;
  std::uint64_t seed = 0;
  bool operator==(const Provenance&) const = default;
};

/// A mutually nondominated point set; provenance is parallel to points when
/// present.
struct FrontSet {
  std::vector<ObjectiveVector> points;
  std::vector<Provenance> provenance;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

inline std::vector<std::array<double, 3>> as_arrays(std::span<const ObjectiveVector> pts) {
  std::vector<std::array<double, 3>> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.as_array());
  return out;
}

inline FrontSet extract_pareto_front(std::span<const ObjectiveVector> points,
                                     std::span<const Provenance> provenance = {}) {
  FrontSet f;
  for (auto i : pareto_front_indices(as_arrays(points))) {
    f.points.push_back(points[i]);
    if (!provenance.empty()) f.provenance.push_back(provenance[i]);
  }
  return f;
}

/// Union of every archive's final front, re-filtered.
inline FrontSet build_reference_front(std::span<const RunArchive> archives) {
  if (archives.empty()) throw InputError("build_reference_front: no archives");
  std::vector<ObjectiveVector> pts;
  std::vector<Provenance> prov;
  for (const auto& a : archives) {
    for (auto i : a.final_front) {
      pts.push_back(a.evaluations[i].objectives);
      prov.push_back({to_string(a.config.algorithm), a.config.seed});
    }
  }
  return extract_pareto_front(pts, prov);
}

inline FrontSet front_of(const RunArchive& a) {
  FrontSet f;
  for (auto i : a.final_front) {
    f.points.push_back(a.evaluations[i].objectives);
    f.provenance.push_back({to_string(a.config.algorithm), a.config.seed});
  }
  return f;
}

/// Mean distance from each reference point to its nearest front point, after
/// per-axis min-max normalisation over front and reference together. Axes with
/// zero span contribute nothing. An empty front yields +inf.
inline double igd(const FrontSet& front, const FrontSet& reference) {
  if (reference.empty()) throw InputError("igd: empty reference front");
  if (front.empty()) {
    std::clog << "warning: igd of an empty front is +inf\n";
    return std::numeric_limits<double>::infinity();
  }
  const auto f = as_arrays(front.points);
  const auto r = as_arrays(reference.points);
  std::array<double, 3> lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto* set : {&f, &r}) {
    for (const auto& p : *set) {
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
  }
  auto norm = [&](const std::array<double, 3>& p, int k) {
    const double span = hi[k] - lo[k];
    return span > 0.0 ? (p[k] - lo[k]) / span : 0.0;
  };
  double total = 0.0;
  for (const auto& q : r) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : f) {
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double d = norm(q, k) - norm(p, k);
        d2 += d * d;
      }
      best = std::min(best, d2);
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(r.size());
}

}  // namespace vchar
