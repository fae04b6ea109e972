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
#include <span>
#include <string>
#include <vector>

#include "core/instance.hpp"
#include "core/utility.hpp"
#include "datagen/generators.hpp"
#include "policies/policies.hpp"
#include "solver/solver.hpp"

namespace cmatch {

/// Utility family as written in a config: one descriptor shared by every
/// bidder, or an explicit per-bidder list.
struct UtilityDescriptor {
  std::optional<UtilityFn> shared = Power{0.9};
  std::vector<UtilityFn> per_bidder;

  UtilitySpec build(std::size_t m) const;
  /// Exponent p of a shared Power descriptor, if that is what this is.
  std::optional<double> power() const;
};

enum class ResampleMode { kPermuteOnly, kFreshInstance };

std::string_view resample_name(ResampleMode mode);
ResampleMode parse_resample(std::string_view name);

struct PolicyEntry {
  PolicyId id = PolicyId::kDla;
  PolicyConfig cfg;
};

struct ExperimentConfig {
  GeneratorConfig generator;
  std::vector<PolicyEntry> policies;
  UtilityDescriptor spec;
  int runs = 1;
  ResampleMode resample = ResampleMode::kFreshInstance;
  std::uint64_t base_seed = 0;
  SolverConfig solver;

  void validate() const;
};

/// One (replication, policy) outcome.
struct RunRecord {
  std::size_t policy_index = 0;
  PolicyId policy = PolicyId::kDla;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double revenue = 0.0;
  std::optional<double> perturbed_revenue;
  double opt = 0.0;
  double rl = 0.0;
  bool warmup_used = false;
  std::vector<ResolveSnapshot> resolves;
  /// Filled only when decisions are requested.
  std::vector<int> decisions;
  double concavity_slack = 0.0;
};

struct PolicyStats {
  PolicyId policy = PolicyId::kDla;
  PolicyConfig cfg;
  double mean_rl = 0.0;
  /// Sample standard deviation (n - 1 denominator); 0 for a single run.
  double std_rl = 0.0;
  double mean_revenue = 0.0;
  double mean_opt = 0.0;
  int runs = 0;
  double wall_seconds = 0.0;
};

struct SummaryStats {
  std::vector<PolicyStats> policies;
  /// Ordered by replication, then policy.
  std::vector<RunRecord> records;
  double wall_seconds = 0.0;
};

struct MonteCarloOptions {
  /// 0 = hardware concurrency.
  unsigned threads = 0;
  bool keep_decisions = false;
  /// Use this instance for every replication instead of the generator.
  const Instance* fixed_instance = nullptr;
};

/// Replication r uses seed base_seed + r for its arrival order and, in
/// fresh_instance mode, for its bids. In permute_only mode the bids are
/// drawn once from base_seed. Aggregation is a sequential reduce over
/// replication index, so the thread count never changes the result.
SummaryStats monte_carlo(const ExperimentConfig& cfg,
                         const MonteCarloOptions& opts = {});

/// Instance a replication runs on (permute_only ignores `replication`).
Instance replication_instance(const ExperimentConfig& cfg,
                              std::size_t replication);

enum class SweepAxis { kEpsilon, kN, kPower };

std::string_view sweep_axis_name(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

struct SweepCell {
  double value = 0.0;
  ExperimentConfig config;
  SummaryStats summary;
};

/// Applies one grid value to a copy of the config.
ExperimentConfig with_axis_value(const ExperimentConfig& base, SweepAxis axis,
                                 double value);

/// Every cell reuses base_seed, so policies and cells are compared on the
/// same instance draws.
std::vector<SweepCell> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                 std::span<const double> values,
                                 const MonteCarloOptions& opts = {});

/// Worker count from CONCAVE_MATCH_THREADS, else hardware concurrency.
unsigned default_thread_count();

}  // namespace cmatch
