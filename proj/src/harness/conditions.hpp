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
#include <string>
#include <vector>

#include "core/instance.hpp"
#include "core/utility.hpp"
#include "policies/policies.hpp"

namespace cmatch {

/// 12 m ln(m^2 n / eps) / eps^3: lower bound on min_i u_hat_i that makes the
/// one-time learner near-optimal.
double ola_threshold(std::size_t m, std::size_t n, double epsilon);
/// 16 m ln(m^2 n / eps) / eps^2: the same for every dynamic resolve.
double dla_threshold(std::size_t m, std::size_t n, double epsilon);

/// 2 / eta^((2 - p) / (1 - p)). Empty for p = 1.
std::optional<double> power_growth_constant(double p, double eta);

/// Smallest F (up to bisection tolerance, returned from the feasible side)
/// with M_i'(eta F C) < eta M_k'(C) for all i, k. Empty when no finite F
/// exists (a linear utility, or the bracket search overflows).
std::optional<double> growth_constant_by_bisection(const UtilitySpec& spec,
                                                   double eta, double c);

/// True when M_i'(eta F C) < eta M_k'(C) holds for all i, k.
bool growth_condition_holds(const UtilitySpec& spec, double eta, double f,
                            double c);

struct ResolveCheck {
  std::size_t prefix_len = 0;
  double min_u_hat = 0.0;
  bool meets_threshold = false;
};

/// Input-only sufficient conditions for near-optimality. They are
/// sufficient, not necessary.
struct ConditionReport {
  std::size_t m = 0;
  std::size_t n = 0;
  double epsilon = 0.0;
  double b_bar = 0.0;
  double eta = 0.0;
  std::optional<double> growth_constant;
  std::string growth_constant_method;  // "closed_form", "bisection", "undefined"
  double c_ola = 0.0;
  double c_dla = 0.0;
  /// max{12 ln(m/eps) / (eps b^2), 4 m C_ola F / (eps b)}
  double n_bound_ola = 0.0;
  /// max{24 ln(m/eps) / (eps b^2), 4 m C_dla F / (eps b)}
  double n_bound_dla = 0.0;
  bool ola_satisfied = false;
  bool dla_satisfied = false;
  /// Threshold checks on the u_hat of a supplied run (C_ola for OLA runs,
  /// C_dla otherwise).
  std::vector<ResolveCheck> resolves;
};

ConditionReport condition_report(const Instance& instance, double epsilon,
                                 const UtilitySpec& spec,
                                 const RunResult* run = nullptr);

std::string condition_report_json(const ConditionReport& report);

}  // namespace cmatch
