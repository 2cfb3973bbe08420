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

// Real-coded variation operators: bounded simulated binary crossover and
// polynomial mutation, in the formulation used by jMetal.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "vchar/characteristics.hpp"
#include "vchar/rng.hpp"

namespace vchar {

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const noexcept { return lower.size(); }

  static Bounds of(const CharacteristicTable& table) { return {table.lower_bounds(), table.upper_bounds()}; }
};

inline Assignment uniform_sample(const Bounds& b, Rng& rng) {
  Assignment a;
  a.values.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a.values.push_back(rng.uniform(b.lower[i], b.upper[i]));
  return a;
}

inline std::pair<Assignment, Assignment> sbx_crossover(const Assignment& p1, const Assignment& p2,
                                                       const Bounds& bounds, double rate, double eta,
                                                       Rng& rng) {
  constexpr double kEps = 1.0e-14;
  require_same_length(p1.size(), p2.size(), "sbx_crossover");
  require_same_length(p1.size(), bounds.size(), "sbx_crossover");
  Assignment c1 = p1;
  Assignment c2 = p2;
  if (!(rng.uniform01() <= rate)) return {c1, c2};

  const double exponent = 1.0 / (eta + 1.0);
  auto spread = [&](double beta, double u) {
    const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
    return u <= 1.0 / alpha ? std::pow(u * alpha, exponent) : std::pow(1.0 / (2.0 - u * alpha), exponent);
  };

  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (!(rng.uniform01() <= 0.5)) continue;
    if (std::abs(p1[i] - p2[i]) <= kEps) continue;
    const double y1 = std::min(p1[i], p2[i]);
    const double y2 = std::max(p1[i], p2[i]);
    const double lo = bounds.lower[i];
    const double hi = bounds.upper[i];
    const double u = rng.uniform01();

    const double betaq_low = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1), u);
    double a = 0.5 * (y1 + y2 - betaq_low * (y2 - y1));
    const double betaq_high = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1), u);
    double b = 0.5 * (y1 + y2 + betaq_high * (y2 - y1));
    a = std::clamp(a, lo, hi);
    b = std::clamp(b, lo, hi);
    if (rng.uniform01() <= 0.5) std::swap(a, b);
    c1[i] = a;
    c2[i] = b;
  }
  return {c1, c2};
}

inline Assignment polynomial_mutation(const Assignment& a, const Bounds& bounds, double rate, double eta,
                                      Rng& rng) {
  require_same_length(a.size(), bounds.size(), "polynomial_mutation");
  Assignment out = a;
  const double exponent = 1.0 / (eta + 1.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(rng.uniform01() <= rate)) continue;
    const double lo = bounds.lower[i];
    const double hi = bounds.upper[i];
    if (lo == hi) {
      out[i] = lo;
      continue;
    }
    const double y = a[i];
    const double delta1 = (y - lo) / (hi - lo);
    const double delta2 = (hi - y) / (hi - lo);
    const double u = rng.uniform01();
    double deltaq;
    if (u <= 0.5) {
      const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - delta1, eta + 1.0);
      deltaq = std::pow(val, exponent) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - delta2, eta + 1.0);
      deltaq = 1.0 - std::pow(val, exponent);
    }
    out[i] = std::clamp(y + deltaq * (hi - lo), lo, hi);
  }
  return out;
}

}  // namespace vchar
