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
#include <string>
#include <vector>

#include "core/instance.hpp"
#include "core/utility.hpp"
#include "policies/policies.hpp"
#include "solver/solver.hpp"

namespace cmatch {

/// Per (bidder, resolve) comparison of the learned u_hat against what the
/// prices it induces actually allocate.
struct ConcentrationRow {
  std::size_t bidder = 0;
  std::size_t resolve = 0;
  std::size_t prefix_len = 0;
  double u_hat = 0.0;
  /// Value allocated in the segment that used these prices.
  double segment_value = 0.0;
  /// segment_value projected to the full horizon: (n / |segment|) x value.
  double projected_segment_value = 0.0;
  /// Value allocated over all n arrivals had these prices been used
  /// throughout.
  double full_horizon_value = 0.0;
  /// eps sqrt(n / l_k).
  double envelope = 0.0;
  bool segment_inside = false;
  bool full_horizon_inside = false;
};

struct ConcentrationDiagnostics {
  RunResult run;
  std::vector<ConcentrationRow> rows;
  double segment_violation_fraction = 0.0;
  double full_horizon_violation_fraction = 0.0;
};

/// Runs the dynamic learner and measures, for every resolve, how far the
/// realized allocation strays from u_hat. Diagnostic only: nothing here is
/// asserted to hold.
ConcentrationDiagnostics concentration_diagnostics(
    const Instance& instance, const ArrivalOrder& order, double epsilon,
    const UtilitySpec& spec, const SolverConfig& solver_cfg);

std::string diagnostics_csv(const ConcentrationDiagnostics& diag);

}  // namespace cmatch
