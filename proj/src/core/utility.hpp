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
#include <string>
#include <variant>
#include <vector>

namespace cmatch {

// Derivatives are evaluated at max(x, kGradientFloor) so that M'(0) stays
// finite for power utilities with p < 1.
inline constexpr double kGradientFloor = 1e-9;

/// M(x) = x^p, 0 < p <= 1.
struct Power {
  double p = 1.0;
};

/// M(x) = log(1 + x).
struct Log {};

/// M(x) = a * x^p, a > 0, 0 < p <= 1.
struct ScaledPower {
  double a = 1.0;
  double p = 1.0;
};

using UtilityFn = std::variant<Power, Log, ScaledPower>;

/// Throws kArgument when the parameters leave the concave family.
void validate(const UtilityFn& fn);

double utility_value(const UtilityFn& fn, double x);
/// M'(max(x, kGradientFloor)).
double utility_derivative(const UtilityFn& fn, double x);
/// Solves M'(x) = g for x >= 0. Empty when M' is constant or g is out of
/// the derivative's range.
std::optional<double> utility_inverse_derivative(const UtilityFn& fn, double g);

/// True when M' is constant (linear utility).
bool is_linear(const UtilityFn& fn);

std::string describe(const UtilityFn& fn);

/// Per-bidder concave return functions M_i.
class UtilitySpec {
 public:
  UtilitySpec() = default;
  explicit UtilitySpec(std::vector<UtilityFn> per_bidder);

  static UtilitySpec uniform(const UtilityFn& fn, std::size_t m);

  std::size_t size() const noexcept { return fns_.size(); }
  const UtilityFn& at(std::size_t i) const;
  const std::vector<UtilityFn>& functions() const noexcept { return fns_; }

  /// Single shared descriptor, if every bidder uses the same one.
  std::optional<UtilityFn> common() const;

  double value(std::size_t i, double x) const;
  double grad(std::size_t i, double x) const;

  /// Sum_i M_i(u_i).
  double total(std::span<const double> u) const;

 private:
  void check_index(std::size_t i) const;

  std::vector<UtilityFn> fns_;
};

}  // namespace cmatch
