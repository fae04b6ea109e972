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
#include <cstdint>
#include <span>
#include <vector>

namespace cmatch {

/// Bid matrix b_ij for m bidders and n arrivals.
///
/// Storage is arrival-major: the m bids of arrival j are contiguous, which is
/// the access pattern of every online policy. The external formats are
/// bidder-major (one row per bidder).
class Instance {
 public:
  Instance() = default;

  /// Validates (finite, non-negative, m, n >= 1) without rescaling.
  static Instance from_rows(std::size_t m, std::size_t n,
                            std::span<const double> row_major,
                            double scale_factor = 1.0);

  std::size_t bidders() const noexcept { return m_; }
  std::size_t arrivals() const noexcept { return n_; }
  double scale_factor() const noexcept { return scale_factor_; }

  double bid(std::size_t i, std::size_t j) const noexcept {
    return bids_[j * m_ + i];
  }
  /// Bids of all bidders for arrival j.
  std::span<const double> column(std::size_t j) const noexcept {
    return {bids_.data() + j * m_, m_};
  }

  double max_bid() const noexcept;
  /// Smallest strictly positive bid; 0 when every bid is zero.
  double min_positive_bid() const noexcept;

  std::vector<double> to_rows() const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::vector<double> bids_;
  double scale_factor_ = 1.0;
};

/// Divides every bid by the largest one so that max_ij b_ij = 1.
Instance scale_instance(std::size_t m, std::size_t n,
                        std::span<const double> row_major);
Instance scale_instance(const Instance& instance);

class Rng;

/// Adds independent U[0, eta_pert] noise to every bid and rescales.
Instance apply_perturbation(const Instance& instance, double eta_pert,
                            Rng& rng);

/// Order in which arrival columns are revealed (0-based column indices).
struct ArrivalOrder {
  std::vector<std::size_t> permutation;
  std::uint64_t seed = 0;

  static ArrivalOrder identity(std::size_t n);
  /// Throws kValidation unless permutation is a bijection on {0..n-1}.
  void validate(std::size_t n) const;
};

}  // namespace cmatch
