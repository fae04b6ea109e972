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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/instance.hpp"
#include "core/utility.hpp"
#include "solver/solver.hpp"

namespace cmatch {

class Rng;

enum class PolicyId { kOla, kDla, kMyopic, kOffline };

std::string_view policy_name(PolicyId id);
/// Accepts "ola", "dla", "myopic", "offline".
PolicyId parse_policy(std::string_view name);

struct PolicyConfig {
  double epsilon = 0.1;
  /// Allocate the learning prefix myopically instead of skipping it.
  bool warmup_allocation = false;
  /// Size of the U[0, eta] general-position perturbation, if any.
  std::optional<double> perturb;

  void validate() const;
};

struct ResolveSnapshot {
  std::size_t prefix_len = 0;
  std::vector<double> u_hat;
  double objective = 0.0;
  double gap_certificate = 0.0;
  int iterations = 0;
  bool hit_iteration_cap = false;
};

/// Arrivals at positions [begin, end) of the order, allocated with the prices
/// of resolve `resolve` (-1: myopic rule). `u` holds the value each bidder
/// received in the segment.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  int resolve = -1;
  std::vector<double> u;
};

struct RunResult {
  PolicyId policy = PolicyId::kMyopic;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  /// Column index of the arrival at each position.
  std::vector<std::size_t> order;
  /// Bidder chosen at each position, kUnallocated for none.
  std::vector<int> decisions;
  /// Sum of the segment accumulators, in segment order.
  std::vector<double> u_final;
  double revenue = 0.0;
  /// Revenue measured on the perturbed bids the policy actually saw.
  std::optional<double> perturbed_revenue;
  std::vector<ResolveSnapshot> resolves;
  std::vector<Segment> segments;
  bool warmup_used = false;
};

/// ceil(eps * n), ceil(2 eps * n), ... truncated to values < n.
std::vector<std::size_t> resolve_points(std::size_t n, double epsilon);

RunResult run_ola(const Instance& instance, const ArrivalOrder& order,
                  const UtilitySpec& spec, const PolicyConfig& cfg,
                  const SolverConfig& solver_cfg);

RunResult run_dla(const Instance& instance, const ArrivalOrder& order,
                  const UtilitySpec& spec, const PolicyConfig& cfg,
                  const SolverConfig& solver_cfg);

RunResult run_myopic(const Instance& instance, const ArrivalOrder& order,
                     const UtilitySpec& spec);

/// Optimal value of the fractional offline problem.
PrimalSolution solve_offline(const Instance& instance, const UtilitySpec& spec,
                             const SolverConfig& solver_cfg);
double run_offline(const Instance& instance, const UtilitySpec& spec,
                   const SolverConfig& solver_cfg);

/// 1 - actual / opt.
double relative_loss(double actual_revenue, double opt);
inline constexpr double kRelativeLossFloor = -1e-6;

/// Dispatches on `id`. With cfg.perturb set, the policy runs on a perturbed
/// copy drawn from `perturb_rng`, while u_final, segments and revenue are
/// re-measured on the original bids. kOffline is rejected here.
RunResult run_policy(PolicyId id, const Instance& instance,
                     const ArrivalOrder& order, const UtilitySpec& spec,
                     const PolicyConfig& cfg, const SolverConfig& solver_cfg,
                     Rng* perturb_rng);

/// Recomputes segment accumulators, u_final and revenue of `run` against
/// the bids of `instance`.
void remeasure(RunResult& run, const Instance& instance,
               const UtilitySpec& spec);

/// sum_i M_i(sum_k ubar_i^k) - sum_k alpha_k sum_i M_i(ubar_i^k / alpha_k)
/// with alpha_k = |segment k| / n. Non-negative by concavity since the
/// weights sum to at most one.
double segment_concavity_slack(const RunResult& run, const UtilitySpec& spec);

}  // namespace cmatch
