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

#include "core/allocation.hpp"

#include "core/error.hpp"

namespace cmatch {

std::vector<double> marginal_prices(std::span<const double> w,
                                    const UtilitySpec& spec) {
  require(w.size() == spec.size(), ErrorKind::kArgument,
          "price point length does not match utility spec");
  std::vector<double> prices(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) prices[k] = spec.grad(k, w[k]);
  return prices;
}

int allocate_by_prices(std::span<const double> prices,
                       std::span<const double> q) {
  require(prices.size() == q.size(), ErrorKind::kArgument,
          "bid vector length does not match price vector");
  int best = kUnallocated;
  double best_score = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k] <= 0.0) continue;
    const double score = q[k] * prices[k];
    if (best == kUnallocated || score > best_score) {
      best = static_cast<int>(k);
      best_score = score;
    }
  }
  return best;
}

int allocate_rule(std::span<const double> w, std::span<const double> q,
                  const UtilitySpec& spec) {
  require(w.size() == q.size(), ErrorKind::kArgument,
          "allocation rule needs w and q of equal length");
  const std::vector<double> prices = marginal_prices(w, spec);
  return allocate_by_prices(prices, q);
}

int argmax_bid(std::span<const double> q) {
  int best = kUnallocated;
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k] > 0.0 && (best == kUnallocated || q[k] > q[best]))
      best = static_cast<int>(k);
  }
  return best;
}

AllocationState::AllocationState(std::size_t bidders, std::size_t arrivals)
    : u_(bidders, 0.0),
      decisions_(arrivals, kUnallocated),
      decided_(arrivals, 0) {}

void AllocationState::assign(std::size_t t, int bidder,
                             std::span<const double> bids) {
  require(t < decisions_.size(), ErrorKind::kArgument,
          "arrival position out of range");
  require(!decided_[t], ErrorKind::kArgument,
          "arrival already has an irrevocable decision");
  require(bidder == kUnallocated ||
              (bidder >= 0 && static_cast<std::size_t>(bidder) < u_.size()),
          ErrorKind::kArgument, "bidder index out of range");
  decided_[t] = 1;
  decisions_[t] = bidder;
  if (bidder != kUnallocated) u_[bidder] += bids[bidder];
}

}  // namespace cmatch
