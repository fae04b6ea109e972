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

#include "core/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace cmatch {

Instance Instance::from_rows(std::size_t m, std::size_t n,
                             std::span<const double> row_major,
                             double scale_factor) {
  require(m >= 1 && n >= 1, ErrorKind::kValidation,
          "instance needs at least one bidder and one arrival");
  require(row_major.size() == m * n, ErrorKind::kValidation,
          "bid matrix size does not match m x n");
  require(scale_factor > 0.0 && std::isfinite(scale_factor),
          ErrorKind::kValidation, "scale factor must be positive");
  Instance out;
  out.m_ = m;
  out.n_ = n;
  out.scale_factor_ = scale_factor;
  out.bids_.resize(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double b = row_major[i * n + j];
      if (!std::isfinite(b) || b < 0.0) {
        std::ostringstream os;
        os << "bid (" << i << ", " << j << ") must be finite and >= 0, got "
           << b;
        fail(ErrorKind::kValidation, os.str());
      }
      out.bids_[j * m + i] = b;
    }
  }
  return out;
}

double Instance::max_bid() const noexcept {
  return bids_.empty() ? 0.0 : *std::max_element(bids_.begin(), bids_.end());
}

double Instance::min_positive_bid() const noexcept {
  double best = 0.0;
  for (double b : bids_) {
    if (b > 0.0 && (best == 0.0 || b < best)) best = b;
  }
  return best;
}

std::vector<double> Instance::to_rows() const {
  std::vector<double> rows(m_ * n_);
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < n_; ++j) rows[i * n_ + j] = bids_[j * m_ + i];
  return rows;
}

Instance scale_instance(std::size_t m, std::size_t n,
                        std::span<const double> row_major) {
  Instance raw = Instance::from_rows(m, n, row_major);
  return scale_instance(raw);
}

Instance scale_instance(const Instance& instance) {
  const double top = instance.max_bid();
  require(top > 0.0, ErrorKind::kDegenerateInstance,
          "degenerate instance: every bid is zero");
  std::vector<double> rows = instance.to_rows();
  // b / top is correctly rounded, so the maximum entry maps to exactly 1.
  if (top != 1.0) {
    for (double& b : rows) b /= top;
  }
  return Instance::from_rows(instance.bidders(), instance.arrivals(), rows,
                             instance.scale_factor() * top);
}

Instance apply_perturbation(const Instance& instance, double eta_pert,
                            Rng& rng) {
  require(eta_pert > 0.0 && std::isfinite(eta_pert), ErrorKind::kArgument,
          "perturbation size must be positive");
  std::vector<double> rows = instance.to_rows();
  for (double& b : rows) b += rng.uniform(0.0, eta_pert);
  Instance noisy = Instance::from_rows(instance.bidders(), instance.arrivals(),
                                       rows, instance.scale_factor());
  return scale_instance(noisy);
}

ArrivalOrder ArrivalOrder::identity(std::size_t n) {
  ArrivalOrder order;
  order.permutation.resize(n);
  std::iota(order.permutation.begin(), order.permutation.end(), 0);
  return order;
}

void ArrivalOrder::validate(std::size_t n) const {
  require(permutation.size() == n, ErrorKind::kValidation,
          "arrival order length does not match instance");
  std::vector<char> seen(n, 0);
  for (std::size_t c : permutation) {
    require(c < n && !seen[c], ErrorKind::kValidation,
            "arrival order is not a permutation");
    seen[c] = 1;
  }
}

}  // namespace cmatch
