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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "core/instance.hpp"
#include "core/utility.hpp"

namespace cmatch {

enum class InitRule {
  kUniform,  // x_ij = 1/m
  kMyopic,   // every column to its highest bid
};

struct SolverConfig {
  double rel_tol = 1e-6;
  int max_iters = 10000;
  InitRule init = InitRule::kUniform;

  void validate() const;
};

/// Maximizer of sum_i M_i(u_i) subject to u_i = (n/l) sum_{j<=l} b_ij x_ij
/// over the per-column simplices sum_i x_ij <= 1, x >= 0.
struct PrimalSolution {
  std::size_t bidders = 0;
  std::size_t prefix_len = 0;
  std::size_t horizon = 0;
  /// prefix_len x bidders, arrival-major: x[j * bidders + i].
  std::vector<double> x;
  std::vector<double> u_hat;
  double objective = 0.0;
  /// <grad f(u_hat), s - u_hat> for the best vertex s.
  double fw_gap = 0.0;
  /// Value of the dual-feasible point built from u_hat.
  double dual_bound = 0.0;
  /// dual_bound - objective, clamped at zero.
  double gap_certificate = 0.0;
  int iterations = 0;
  bool hit_iteration_cap = false;
};

struct SolverIterate {
  int iter = 0;
  double objective = 0.0;
  double fw_gap = 0.0;
  double step_size = 0.0;
  std::span<const double> u;
};

using SolverObserver = std::function<void(const SolverIterate&)>;

/// Solves the partial program on the arrival columns `prefix` (in arrival
/// order) with projection factor horizon / prefix.size().
///
/// Conditional gradient with pairwise steps between the best vertex and the
/// worst active vertex, exact line search by golden section, and a local
/// correction pass over the active vertex set after every oracle call.
/// Stops when gap_certificate <= rel_tol * max(1, objective).
PrimalSolution solve_concave_program(const Instance& instance,
                                     std::span<const std::size_t> prefix,
                                     std::size_t horizon,
                                     const UtilitySpec& spec,
                                     const SolverConfig& cfg,
                                     const SolverObserver& observer = {});

/// Prefix = columns 0..prefix_len-1.
PrimalSolution solve_concave_program(const Instance& instance,
                                     std::size_t prefix_len,
                                     std::size_t horizon,
                                     const UtilitySpec& spec,
                                     const SolverConfig& cfg,
                                     const SolverObserver& observer = {});

/// Dual-feasible point built from a primal u_hat: v_i = max(u_hat_i, floor),
/// y_j = max_i b~_ij M_i'(v_i) with b~ = (horizon / l) b. Bidders without a
/// positive bid in the prefix take v_i = 0 and add nothing.
struct DualSolution {
  std::vector<double> v;
  std::vector<double> y;
  /// sum_j y_j + sum_i (M_i(v_i) - M_i'(v_i) v_i)
  double objective = 0.0;
};

DualSolution dual_solution(std::span<const double> u_hat,
                           const Instance& instance,
                           std::span<const std::size_t> prefix,
                           std::size_t horizon, const UtilitySpec& spec);

/// dual_solution(...).objective, an upper bound on the program's optimum.
double dual_upper_bound(std::span<const double> u_hat,
                        const Instance& instance,
                        std::span<const std::size_t> prefix,
                        std::size_t horizon, const UtilitySpec& spec);

double dual_upper_bound(std::span<const double> u_hat,
                        const Instance& instance, std::size_t prefix_len,
                        std::size_t horizon, const UtilitySpec& spec);

/// Collects solver iterates as rows for the trace CSV.
class SolveTrace {
 public:
  SolverObserver observer();
  /// Header "iter,objective,fw_gap,step_size".
  std::string to_csv() const;
  std::size_t size() const noexcept { return rows_.size(); }

 private:
  struct Row {
    int iter;
    double objective;
    double fw_gap;
    double step_size;
  };
  std::vector<Row> rows_;
};

}  // namespace cmatch
