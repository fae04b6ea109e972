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

#include "policies/policies.hpp"

#include <cmath>
#include <sstream>

#include "core/allocation.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace cmatch {
namespace {

void check_inputs(const Instance& instance, const ArrivalOrder& order,
                  const UtilitySpec& spec) {
  order.validate(instance.arrivals());
  require(spec.size() == instance.bidders(), ErrorKind::kArgument,
          "utility spec size does not match number of bidders");
}

RunResult start_run(PolicyId id, const ArrivalOrder& order, double epsilon) {
  RunResult r;
  r.policy = id;
  r.seed = order.seed;
  r.epsilon = epsilon;
  r.order = order.permutation;
  r.decisions.assign(order.permutation.size(), kUnallocated);
  return r;
}

// Allocates positions [begin, end) with fixed prices (or the myopic rule when
// prices is empty) and records the segment.
void allocate_segment(RunResult& run, const Instance& instance,
                      std::size_t begin, std::size_t end, int resolve,
                      const std::vector<double>& prices) {
  Segment seg;
  seg.begin = begin;
  seg.end = end;
  seg.resolve = resolve;
  seg.u.assign(instance.bidders(), 0.0);
  for (std::size_t t = begin; t < end; ++t) {
    const auto col = instance.column(run.order[t]);
    const int k = prices.empty() ? argmax_bid(col)
                                 : allocate_by_prices(prices, col);
    run.decisions[t] = k;
    if (k != kUnallocated) seg.u[k] += col[k];
  }
  run.segments.push_back(std::move(seg));
}

void finish_run(RunResult& run, std::size_t m, const UtilitySpec& spec) {
  run.u_final.assign(m, 0.0);
  for (const auto& seg : run.segments)
    for (std::size_t i = 0; i < m; ++i) run.u_final[i] += seg.u[i];
  run.revenue = spec.total(run.u_final);
}

ResolveSnapshot resolve(const Instance& instance, const RunResult& run,
                        std::size_t prefix_len, const UtilitySpec& spec,
                        const SolverConfig& solver_cfg) {
  const std::span<const std::size_t> prefix(run.order.data(), prefix_len);
  const PrimalSolution sol = solve_concave_program(
      instance, prefix, instance.arrivals(), spec, solver_cfg);
  ResolveSnapshot snap;
  snap.prefix_len = prefix_len;
  snap.u_hat = sol.u_hat;
  snap.objective = sol.objective;
  snap.gap_certificate = sol.gap_certificate;
  snap.iterations = sol.iterations;
  snap.hit_iteration_cap = sol.hit_iteration_cap;
  return snap;
}

RunResult run_learning(PolicyId id, const Instance& instance,
                       const ArrivalOrder& order, const UtilitySpec& spec,
                       const PolicyConfig& cfg,
                       const SolverConfig& solver_cfg) {
  cfg.validate();
  check_inputs(instance, order, spec);
  const std::size_t n = instance.arrivals();
  std::vector<std::size_t> points = resolve_points(n, cfg.epsilon);
  if (id == PolicyId::kOla) points.resize(1);

  RunResult run = start_run(id, order, cfg.epsilon);
  if (cfg.warmup_allocation) {
    allocate_segment(run, instance, 0, points.front(), -1, {});
    run.warmup_used = true;
  }
  for (std::size_t k = 0; k < points.size(); ++k) {
    const std::size_t begin = points[k];
    const std::size_t end = k + 1 < points.size() ? points[k + 1] : n;
    run.resolves.push_back(resolve(instance, run, begin, spec, solver_cfg));
    const std::vector<double> prices =
        marginal_prices(run.resolves.back().u_hat, spec);
    allocate_segment(run, instance, begin, end, static_cast<int>(k), prices);
  }
  finish_run(run, instance.bidders(), spec);
  return run;
}

}  // namespace

std::string_view policy_name(PolicyId id) {
  switch (id) {
    case PolicyId::kOla:
      return "ola";
    case PolicyId::kDla:
      return "dla";
    case PolicyId::kMyopic:
      return "myopic";
    case PolicyId::kOffline:
      return "offline";
  }
  return "unknown";
}

PolicyId parse_policy(std::string_view name) {
  if (name == "ola") return PolicyId::kOla;
  if (name == "dla") return PolicyId::kDla;
  if (name == "myopic") return PolicyId::kMyopic;
  if (name == "offline") return PolicyId::kOffline;
  fail(ErrorKind::kConfiguration,
       "unknown policy '" + std::string(name) +
           "' (expected ola, dla, myopic or offline)");
}

void PolicyConfig::validate() const {
  require(epsilon > 0.0 && epsilon < 0.5, ErrorKind::kConfiguration,
          "epsilon must lie in (0, 0.5)");
  if (perturb) {
    require(*perturb > 0.0 && std::isfinite(*perturb),
            ErrorKind::kConfiguration, "perturb must be positive");
  }
}

std::vector<std::size_t> resolve_points(std::size_t n, double epsilon) {
  require(epsilon > 0.0 && epsilon < 0.5, ErrorKind::kConfiguration,
          "epsilon must lie in (0, 0.5)");
  require(n >= 2, ErrorKind::kConfiguration, "need at least two arrivals");
  const double base = epsilon * static_cast<double>(n);
  // Products such as 0.001 * 10000 may land an ulp above the integer.
  const auto ceil_count = [](double v) {
    return static_cast<std::size_t>(std::ceil(v - 1e-9 * std::max(1.0, v)));
  };
  if (base < 1.0 - 1e-9) {
    std::ostringstream os;
    os << "epsilon too small for n: eps * n = " << base << " < 1";
    fail(ErrorKind::kConfiguration, os.str());
  }
  std::vector<std::size_t> points;
  for (double mult = 1.0;; mult *= 2.0) {
    const std::size_t l = ceil_count(base * mult);
    if (l >= n) break;
    if (points.empty() || l > points.back()) points.push_back(l);
  }
  return points;
}

RunResult run_ola(const Instance& instance, const ArrivalOrder& order,
                  const UtilitySpec& spec, const PolicyConfig& cfg,
                  const SolverConfig& solver_cfg) {
  return run_learning(PolicyId::kOla, instance, order, spec, cfg, solver_cfg);
}

RunResult run_dla(const Instance& instance, const ArrivalOrder& order,
                  const UtilitySpec& spec, const PolicyConfig& cfg,
                  const SolverConfig& solver_cfg) {
  return run_learning(PolicyId::kDla, instance, order, spec, cfg, solver_cfg);
}

RunResult run_myopic(const Instance& instance, const ArrivalOrder& order,
                     const UtilitySpec& spec) {
  check_inputs(instance, order, spec);
  RunResult run = start_run(PolicyId::kMyopic, order, 0.0);
  allocate_segment(run, instance, 0, instance.arrivals(), -1, {});
  finish_run(run, instance.bidders(), spec);
  return run;
}

PrimalSolution solve_offline(const Instance& instance, const UtilitySpec& spec,
                             const SolverConfig& solver_cfg) {
  return solve_concave_program(instance, instance.arrivals(),
                               instance.arrivals(), spec, solver_cfg);
}

double run_offline(const Instance& instance, const UtilitySpec& spec,
                   const SolverConfig& solver_cfg) {
  return solve_offline(instance, spec, solver_cfg).objective;
}

double relative_loss(double actual_revenue, double opt) {
  require(opt > 0.0 && std::isfinite(opt), ErrorKind::kArgument,
          "relative loss needs a positive offline optimum");
  require(actual_revenue >= 0.0, ErrorKind::kArgument,
          "revenue must be non-negative");
  return 1.0 - actual_revenue / opt;
}

RunResult run_policy(PolicyId id, const Instance& instance,
                     const ArrivalOrder& order, const UtilitySpec& spec,
                     const PolicyConfig& cfg, const SolverConfig& solver_cfg,
                     Rng* perturb_rng) {
  require(id != PolicyId::kOffline, ErrorKind::kArgument,
          "offline benchmark is not an online policy");
  auto dispatch = [&](const Instance& inst) {
    switch (id) {
      case PolicyId::kOla:
        return run_ola(inst, order, spec, cfg, solver_cfg);
      case PolicyId::kDla:
        return run_dla(inst, order, spec, cfg, solver_cfg);
      default:
        return run_myopic(inst, order, spec);
    }
  };
  if (!cfg.perturb) return dispatch(instance);
  require(perturb_rng != nullptr, ErrorKind::kArgument,
          "perturbation requested without a random source");
  const Instance noisy = apply_perturbation(instance, *cfg.perturb, *perturb_rng);
  RunResult run = dispatch(noisy);
  run.perturbed_revenue = run.revenue;
  remeasure(run, instance, spec);
  return run;
}

void remeasure(RunResult& run, const Instance& instance,
               const UtilitySpec& spec) {
  for (auto& seg : run.segments) {
    std::fill(seg.u.begin(), seg.u.end(), 0.0);
    for (std::size_t t = seg.begin; t < seg.end; ++t) {
      const int k = run.decisions[t];
      if (k != kUnallocated) seg.u[k] += instance.bid(k, run.order[t]);
    }
  }
  finish_run(run, instance.bidders(), spec);
}

double segment_concavity_slack(const RunResult& run, const UtilitySpec& spec) {
  const double n = static_cast<double>(run.decisions.size());
  const std::size_t m = run.u_final.size();
  double rhs = 0.0;
  for (const auto& seg : run.segments) {
    if (seg.end <= seg.begin) continue;
    const double alpha = static_cast<double>(seg.end - seg.begin) / n;
    for (std::size_t i = 0; i < m; ++i)
      rhs += alpha * spec.value(i, seg.u[i] / alpha);
  }
  return spec.total(run.u_final) - rhs;
}

}  // namespace cmatch
