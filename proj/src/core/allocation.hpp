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
#include <optional>
#include <span>
#include <vector>

#include "core/instance.hpp"
#include "core/utility.hpp"

namespace cmatch {

/// Marker for an arrival that no bidder receives.
inline constexpr int kUnallocated = -1;

/// Index of argmax_k q_k * M_k'(w_k), lowest index on ties. kUnallocated iff
/// every q_k is zero.
int allocate_rule(std::span<const double> w, std::span<const double> q,
                  const UtilitySpec& spec);

/// Same rule with the prices M_k'(w_k) already evaluated.
int allocate_by_prices(std::span<const double> prices,
                       std::span<const double> q);

/// Lowest-index argmax of the raw bids (the myopic rule).
int argmax_bid(std::span<const double> q);

std::vector<double> marginal_prices(std::span<const double> w,
                                    const UtilitySpec& spec);

/// Running accumulators u_i and the per-arrival decisions of one run.
class AllocationState {
 public:
  AllocationState(std::size_t bidders, std::size_t arrivals);

  /// Records the decision for the arrival at position t of the order.
  void assign(std::size_t t, int bidder, std::span<const double> bids);

  const std::vector<double>& u() const noexcept { return u_; }
  const std::vector<int>& decisions() const noexcept { return decisions_; }

 private:
  std::vector<double> u_;
  std::vector<int> decisions_;
  std::vector<char> decided_;
};

}  // namespace cmatch
