// Copyright 2026 The concave-match Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/instance.hpp"
#include "core/utility.hpp"

namespace cmatch {

inline constexpr std::size_t kOracleMaxBidders = 3;
inline constexpr std::size_t kOracleMaxColumns = 5;

struct OracleResult {
  double objective = 0.0;
  /// columns x bidders, arrival-major.
  std::vector<double> x;
  std::vector<double> u;
};

/// Reference maximizer for tiny instances. Enumerates every integer
/// assignment (each column to one bidder or to nobody), then polishes the
/// best one, and the uniform split, by pattern search over single-column
/// mass transfers starting at grid_step and halving down to 1e-12. Uses only
/// function values.
OracleResult brute_force_oracle_solve(const Instance& instance,
                                      std::span<const std::size_t> prefix,
                                      std::size_t horizon,
                                      const UtilitySpec& spec,
                                      double grid_step);

/// Full offline problem (all columns, horizon n).
double brute_force_oracle(const Instance& instance, const UtilitySpec& spec,
                          double grid_step);

}  // namespace cmatch
