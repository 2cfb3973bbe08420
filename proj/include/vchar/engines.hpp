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

#include "vchar/nsga2.hpp"
#include "vchar/random_search.hpp"
#include "vchar/safefuzzer.hpp"

namespace vchar {

inline RunArchive run_search(const SearchConfig& config, const EvaluationContext& ctx, const RunOptions& options = {}) {
  switch (config.algorithm) {
    case Algorithm::nsga2: return run_nsga2(config, ctx, options);
    case Algorithm::random: return run_random_search(config, ctx, options);
    case Algorithm::safefuzzer: return run_safefuzzer(config, ctx, options);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace vchar
