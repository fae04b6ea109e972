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

#include "harness/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <string>
#include <thread>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace cmatch {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ReplicationOutput {
  std::vector<RunRecord> records;
  std::vector<double> policy_seconds;
  std::exception_ptr error;
};

struct SharedInstance {
  std::optional<Instance> instance;
  double opt = 0.0;
};

ReplicationOutput run_replication(const ExperimentConfig& cfg,
                                  const MonteCarloOptions& opts,
                                  const SharedInstance& shared,
                                  std::size_t r) {
  ReplicationOutput out;
  const std::uint64_t seed = cfg.base_seed + r;
  std::optional<Instance> own;
  double opt = shared.opt;
  if (!shared.instance) {
    own = replication_instance(cfg, r);
  }
  const Instance& inst = shared.instance ? *shared.instance : *own;
  const UtilitySpec spec = cfg.spec.build(inst.bidders());
  if (!shared.instance) opt = run_offline(inst, spec, cfg.solver);

  const ArrivalOrder order = sample_permutation(inst.arrivals(), seed);
  out.policy_seconds.assign(cfg.policies.size(), 0.0);
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    const auto& entry = cfg.policies[p];
    const auto start = Clock::now();
    RunRecord rec;
    rec.policy_index = p;
    rec.policy = entry.id;
    rec.replication = r;
    rec.seed = seed;
    rec.epsilon = entry.cfg.epsilon;
    rec.opt = opt;
    if (entry.id == PolicyId::kOffline) {
      rec.revenue = opt;
    } else {
      Rng perturb_rng(derive_seed(seed, kPerturbStream));
      const RunResult run = run_policy(entry.id, inst, order, spec, entry.cfg,
                                       cfg.solver, &perturb_rng);
      rec.revenue = run.revenue;
      rec.perturbed_revenue = run.perturbed_revenue;
      rec.warmup_used = run.warmup_used;
      rec.resolves = run.resolves;
      rec.concavity_slack = segment_concavity_slack(run, spec);
      if (opts.keep_decisions) rec.decisions = run.decisions;
    }
    rec.rl = relative_loss(rec.revenue, opt);
    out.records.push_back(std::move(rec));
    out.policy_seconds[p] = seconds_since(start);
  }
  return out;
}

}  // namespace

UtilitySpec UtilityDescriptor::build(std::size_t m) const {
  if (shared) return UtilitySpec::uniform(*shared, m);
  if (per_bidder.size() != m) {
    std::ostringstream os;
    os << "spec.per_bidder lists " << per_bidder.size()
       << " utilities but the instance has " << m << " bidders";
    fail(ErrorKind::kConfiguration, os.str());
  }
  return UtilitySpec(per_bidder);
}

std::optional<double> UtilityDescriptor::power() const {
  if (shared) {
    if (const auto* p = std::get_if<Power>(&*shared)) return p->p;
  }
  return std::nullopt;
}

std::string_view resample_name(ResampleMode mode) {
  return mode == ResampleMode::kPermuteOnly ? "permute_only" : "fresh_instance";
}

ResampleMode parse_resample(std::string_view name) {
  if (name == "permute_only") return ResampleMode::kPermuteOnly;
  if (name == "fresh_instance") return ResampleMode::kFreshInstance;
  fail(ErrorKind::kConfiguration,
       "unknown resample mode '" + std::string(name) +
           "' (expected permute_only or fresh_instance)");
}

void ExperimentConfig::validate() const {
  generator.validate();
  require(runs >= 1, ErrorKind::kConfiguration, "runs must be >= 1");
  require(!policies.empty(), ErrorKind::kConfiguration,
          "policies must list at least one policy");
  for (const auto& p : policies) {
    if (p.id == PolicyId::kOla || p.id == PolicyId::kDla) p.cfg.validate();
  }
  solver.validate();
  const auto check = [](const UtilityFn& f) {
    try {
      cmatch::validate(f);
    } catch (const Error& e) {
      fail(ErrorKind::kConfiguration, e.what());
    }
  };
  if (spec.shared) {
    check(*spec.shared);
  } else {
    require(!spec.per_bidder.empty(), ErrorKind::kConfiguration,
            "spec must name a utility family");
    require(spec.per_bidder.size() == generator.m, ErrorKind::kConfiguration,
            "spec.per_bidder length must equal generator.m");
    for (const auto& f : spec.per_bidder) check(f);
  }
}

Instance replication_instance(const ExperimentConfig& cfg,
                              std::size_t replication) {
  GeneratorConfig gen = cfg.generator;
  gen.seed = cfg.resample == ResampleMode::kFreshInstance
                 ? cfg.base_seed + replication
                 : cfg.base_seed;
  return generate(gen);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("CONCAVE_MATCH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

SummaryStats monte_carlo(const ExperimentConfig& cfg,
                         const MonteCarloOptions& opts) {
  cfg.validate();
  const auto start = Clock::now();
  const std::size_t runs = static_cast<std::size_t>(cfg.runs);

  SharedInstance shared;
  if (opts.fixed_instance) {
    shared.instance = *opts.fixed_instance;
  } else if (cfg.resample == ResampleMode::kPermuteOnly) {
    shared.instance = replication_instance(cfg, 0);
  }
  if (shared.instance) {
    const UtilitySpec spec = cfg.spec.build(shared.instance->bidders());
    shared.opt = run_offline(*shared.instance, spec, cfg.solver);
  }

  std::vector<ReplicationOutput> outputs(runs);
  const unsigned threads = std::max<unsigned>(
      1, std::min<unsigned>(opts.threads ? opts.threads : default_thread_count(),
                            static_cast<unsigned>(runs)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < runs; r = next++) {
      try {
        outputs[r] = run_replication(cfg, opts, shared, r);
      } catch (...) {
        outputs[r].error = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SummaryStats summary;
  summary.policies.resize(cfg.policies.size());
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    summary.policies[p].policy = cfg.policies[p].id;
    summary.policies[p].cfg = cfg.policies[p].cfg;
  }
  for (std::size_t r = 0; r < runs; ++r) {
    if (outputs[r].error) {
      std::ostringstream os;
      os << "replication " << r << " (seed " << cfg.base_seed + r
         << ") failed: ";
      try {
        std::rethrow_exception(outputs[r].error);
      } catch (const Error& e) {
        os << e.what();
        throw Error(e.kind(), os.str());
      } catch (const std::exception& e) {
        os << e.what();
        throw Error(ErrorKind::kNumeric, os.str());
      }
    }
    for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
      const RunRecord& rec = outputs[r].records[p];
      PolicyStats& st = summary.policies[p];
      st.mean_rl += rec.rl;
      st.mean_revenue += rec.revenue;
      st.mean_opt += rec.opt;
      st.wall_seconds += outputs[r].policy_seconds[p];
      ++st.runs;
    }
    for (auto& rec : outputs[r].records) summary.records.push_back(std::move(rec));
  }
  for (std::size_t p = 0; p < summary.policies.size(); ++p) {
    PolicyStats& st = summary.policies[p];
    const double k = static_cast<double>(st.runs);
    st.mean_rl /= k;
    st.mean_revenue /= k;
    st.mean_opt /= k;
    double ss = 0.0;
    for (const auto& rec : summary.records) {
      if (rec.policy_index == p) ss += (rec.rl - st.mean_rl) * (rec.rl - st.mean_rl);
    }
    st.std_rl = st.runs > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  }
  summary.wall_seconds = seconds_since(start);
  return summary;
}

std::string_view sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kEpsilon:
      return "epsilon";
    case SweepAxis::kN:
      return "n";
    case SweepAxis::kPower:
      return "power";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "epsilon") return SweepAxis::kEpsilon;
  if (name == "n") return SweepAxis::kN;
  if (name == "power" || name == "p") return SweepAxis::kPower;
  fail(ErrorKind::kConfiguration, "unknown sweep axis '" + std::string(name) +
                                      "' (expected epsilon, n or power)");
}

ExperimentConfig with_axis_value(const ExperimentConfig& base, SweepAxis axis,
                                 double value) {
  ExperimentConfig cfg = base;
  switch (axis) {
    case SweepAxis::kEpsilon:
      for (auto& p : cfg.policies) p.cfg.epsilon = value;
      break;
    case SweepAxis::kN:
      require(value >= 1.0 && value == std::floor(value),
              ErrorKind::kConfiguration, "sweep values for n must be integers");
      cfg.generator.n = static_cast<std::size_t>(value);
      break;
    case SweepAxis::kPower:
      cfg.spec.shared = Power{value};
      cfg.spec.per_bidder.clear();
      validate(*cfg.spec.shared);
      break;
  }
  return cfg;
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                 std::span<const double> values,
                                 const MonteCarloOptions& opts) {
  require(!values.empty(), ErrorKind::kConfiguration,
          "sweep needs at least one value");
  require(!(axis == SweepAxis::kN && opts.fixed_instance),
          ErrorKind::kConfiguration,
          "cannot sweep n over a fixed instance file");
  std::vector<SweepCell> cells;
  for (double v : values) {
    SweepCell cell;
    cell.value = v;
    cell.config = with_axis_value(base, axis, v);
    cell.summary = monte_carlo(cell.config, opts);
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace cmatch
