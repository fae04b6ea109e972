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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "core/allocation.hpp"
#include "core/error.hpp"
#include "core/instance_io.hpp"
#include "core/rng.hpp"
#include "datagen/generators.hpp"
#include "policies/policies.hpp"
#include "solver/oracle.hpp"
#include "support.hpp"

namespace cmatch {
namespace {

Instance load_fixture(const std::string& name) {
  return load_instance(std::string(CMATCH_TEST_DATA) + "/" + name);
}

// Hand-evaluated allocation for Power(0.5): score_i = b_i / (2 sqrt(u_i)).
// Also returns the relative gap between the two best scores.
std::pair<int, double> sqrt_rule(const Instance& inst, std::size_t j,
                                 const std::vector<double>& u) {
  double best = -1.0, second = -1.0;
  int arg = -1;
  for (std::size_t i = 0; i < inst.bidders(); ++i) {
    const double s = inst.bid(i, j) / (2.0 * std::sqrt(u[i]));
    if (s > best) {
      second = best;
      best = s;
      arg = static_cast<int>(i);
    } else if (s > second) {
      second = s;
    }
  }
  return {arg, (best - second) / best};
}

TEST(ResolvePoints, Examples) {
  EXPECT_EQ(resolve_points(800, 0.125), (std::vector<std::size_t>{100, 200, 400}));
  EXPECT_EQ(resolve_points(100, 0.1), (std::vector<std::size_t>{10, 20, 40, 80}));
  EXPECT_EQ(resolve_points(10000, 0.001),
            (std::vector<std::size_t>{10, 20, 40, 80, 160, 320, 640, 1280, 2560, 5120}));
  EXPECT_EQ(resolve_points(10, 0.25), (std::vector<std::size_t>{3, 5}));
}

TEST(ResolvePoints, Errors) {
  try {
    resolve_points(100, 0.001);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfiguration);
    EXPECT_NE(std::string(e.what()).find("epsilon too small for n"), std::string::npos);
  }
  EXPECT_THROW(resolve_points(100, 0.5), Error);
  EXPECT_THROW(resolve_points(100, 0.0), Error);
}

TEST(Myopic, Example) {
  const Instance inst = Instance::from_rows(2, 2, std::vector<double>{1, 0.9, 0.5, 0.95});
  const UtilitySpec half = UtilitySpec::uniform(Power{0.5}, 2);
  const RunResult r = run_myopic(inst, ArrivalOrder::identity(2), half);
  EXPECT_EQ(r.decisions, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(r.u_final[0], 1.0);
  EXPECT_DOUBLE_EQ(r.u_final[1], 0.95);
  EXPECT_NEAR(r.revenue, 1.97468, 1e-5);
  EXPECT_DOUBLE_EQ(r.revenue, 1.0 + std::sqrt(0.95));
}

TEST(Myopic, ZeroColumnAndTies) {
  const Instance inst = Instance::from_rows(2, 3, std::vector<double>{0, 0.5, 1, 0, 0.5, 0.2});
  const RunResult r =
      run_myopic(inst, ArrivalOrder::identity(3), UtilitySpec::uniform(Power{0.9}, 2));
  EXPECT_EQ(r.decisions, (std::vector<int>{kUnallocated, 0, 0}));
}

TEST(RelativeLoss, Examples) {
  EXPECT_DOUBLE_EQ(relative_loss(3.0, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_loss(0.0, 3.0), 1.0);
  EXPECT_NEAR(relative_loss(0.97 * 3.0, 3.0), 0.03, 1e-15);
  EXPECT_THROW(relative_loss(1.0, 0.0), Error);
  EXPECT_THROW(relative_loss(-1.0, 1.0), Error);
}

TEST(Offline, Examples) {
  const Instance lin = Instance::from_rows(2, 2, std::vector<double>{1, 0.2, 0.3, 0.8});
  EXPECT_NEAR(run_offline(lin, UtilitySpec::uniform(Power{1.0}, 2), {}), 1.8, 1e-9);
  const Instance one = Instance::from_rows(1, 3, std::vector<double>{0.5, 0.25, 1.0});
  EXPECT_NEAR(run_offline(one, UtilitySpec::uniform(Power{0.9}, 1), {}),
              std::pow(1.75, 0.9), 1e-12);
  const Instance fx = Instance::from_rows(2, 3, std::vector<double>{0.9, 0.4, 0.7, 0.5, 0.8, 0.6});
  EXPECT_NEAR(run_offline(fx, UtilitySpec::uniform(Power{0.5}, 2), {}), 2.169046312268,
              1e-4);
}

TEST(Ola, SmallFixtureMatchesHandSimulation) {
  const Instance inst = load_fixture("ola_small_1.csv");
  ASSERT_EQ(inst.bidders(), 2u);
  ASSERT_EQ(inst.arrivals(), 8u);
  const UtilitySpec half = UtilitySpec::uniform(Power{0.5}, 2);
  PolicyConfig cfg;
  cfg.epsilon = 0.25;
  SolverConfig scfg;
  scfg.rel_tol = 1e-10;
  const RunResult r = run_ola(inst, ArrivalOrder::identity(8), half, cfg, scfg);

  const std::vector<std::size_t> prefix = {0, 1};
  const OracleResult o = brute_force_oracle_solve(inst, prefix, 8, half, 0.001);
  std::vector<int> expect = {kUnallocated, kUnallocated};
  std::vector<double> earned(2, 0.0);
  for (std::size_t j = 2; j < 8; ++j) {
    const auto [who, margin] = sqrt_rule(inst, j, o.u);
    ASSERT_GT(margin, 0.01) << "fixture column " << j << " is too close to a tie";
    expect.push_back(who);
    earned[who] += inst.bid(who, j);
  }
  EXPECT_EQ(r.decisions, expect);
  ASSERT_EQ(r.resolves.size(), 1u);
  EXPECT_EQ(r.resolves[0].prefix_len, 2u);
  EXPECT_NEAR(r.revenue, std::sqrt(earned[0]) + std::sqrt(earned[1]), 1e-12);
}

TEST(Dla, SmallFixtureMatchesHandSimulation) {
  const Instance inst = load_fixture("dla_small_1.csv");
  const UtilitySpec half = UtilitySpec::uniform(Power{0.5}, 2);
  PolicyConfig cfg;
  cfg.epsilon = 0.25;
  SolverConfig scfg;
  scfg.rel_tol = 1e-10;
  const RunResult r = run_dla(inst, ArrivalOrder::identity(8), half, cfg, scfg);

  std::vector<int> expect = {kUnallocated, kUnallocated};
  for (auto [l, end] : {std::pair<std::size_t, std::size_t>{2, 4}, {4, 8}}) {
    const OracleResult o = brute_force_oracle_solve(inst, ref::iota(l), 8, half, 0.001);
    for (std::size_t j = l; j < end; ++j) {
      const auto [who, margin] = sqrt_rule(inst, j, o.u);
      ASSERT_GT(margin, 0.01) << "fixture column " << j << " is too close to a tie";
      expect.push_back(who);
    }
  }
  EXPECT_EQ(r.decisions, expect);
  ASSERT_EQ(r.resolves.size(), 2u);
  EXPECT_EQ(r.resolves[0].prefix_len, 2u);
  EXPECT_EQ(r.resolves[1].prefix_len, 4u);
}

TEST(Dla, ResolveCountFollowsDoubling) {
  GeneratorConfig g;
  g.m = 3;
  g.n = 800;
  g.categories = 5;
  g.seed = 3;
  const Instance inst = generate(g);
  PolicyConfig cfg;
  cfg.epsilon = 0.125;
  const RunResult r = run_dla(inst, ArrivalOrder::identity(800),
                              UtilitySpec::uniform(Power{0.9}, 3), cfg, {});
  ASSERT_EQ(r.resolves.size(), 3u);
  EXPECT_EQ(r.resolves[0].prefix_len, 100u);
  EXPECT_EQ(r.resolves[1].prefix_len, 200u);
  EXPECT_EQ(r.resolves[2].prefix_len, 400u);
}

TEST(Ola, SingleBidderTakesEveryPositiveBid) {
  const Instance inst = Instance::from_rows(1, 10, std::vector<double>{1, 0.5, 0, 0.3, 0.2, 0, 0.9, 0.1, 0.4, 0.6});
  PolicyConfig cfg;
  cfg.epsilon = 0.2;
  const RunResult r = run_ola(inst, ArrivalOrder::identity(10),
                              UtilitySpec::uniform(Power{0.5}, 1), cfg, {});
  for (std::size_t j = 2; j < 10; ++j)
    EXPECT_EQ(r.decisions[j], inst.bid(0, j) > 0 ? 0 : kUnallocated);
}

TEST(Policies, WarmupAllocatesPrefixMyopically) {
  const Instance inst = load_fixture("ola_small_1.csv");
  PolicyConfig cfg;
  cfg.epsilon = 0.25;
  cfg.warmup_allocation = true;
  const RunResult r = run_dla(inst, ArrivalOrder::identity(8),
                              UtilitySpec::uniform(Power{0.5}, 2), cfg, {});
  EXPECT_TRUE(r.warmup_used);
  EXPECT_EQ(r.decisions[0], 0);
  EXPECT_EQ(r.decisions[1], 1);
}

TEST(Policies, PerturbedRunReportsBothRevenues) {
  const Instance inst = load_fixture("ola_small_1.csv");
  PolicyConfig cfg;
  cfg.epsilon = 0.25;
  cfg.perturb = 1e-6;
  Rng rng(1);
  const RunResult r = run_policy(PolicyId::kDla, inst, ArrivalOrder::identity(8),
                                 UtilitySpec::uniform(Power{0.5}, 2), cfg, {}, &rng);
  ASSERT_TRUE(r.perturbed_revenue.has_value());
  EXPECT_NEAR(*r.perturbed_revenue, r.revenue, 1e-3);
  EXPECT_THROW(run_policy(PolicyId::kDla, inst, ArrivalOrder::identity(8),
                          UtilitySpec::uniform(Power{0.5}, 2), cfg, {}, nullptr),
               Error);
}

TEST(Policies, NamesRoundTrip) {
  for (PolicyId id : {PolicyId::kOla, PolicyId::kDla, PolicyId::kMyopic, PolicyId::kOffline})
    EXPECT_EQ(parse_policy(policy_name(id)), id);
  EXPECT_THROW(parse_policy("greedy"), Error);
  PolicyConfig bad;
  bad.epsilon = 0.6;
  EXPECT_THROW(bad.validate(), Error);
}

struct Case {
  Instance inst;
  ArrivalOrder order;
  UtilitySpec spec;
  PolicyConfig cfg;
};

Case random_case(std::mt19937_64& gen, double p) {
  std::uniform_int_distribution<std::size_t> dm(1, 4), dn(10, 60);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t m = dm(gen), n = dn(gen);
  std::vector<double> rows(m * n);
  for (double& v : rows) v = unit(gen) < 0.3 ? 0.0 : unit(gen);
  rows[0] = 1.0;
  std::vector<std::size_t> perm = ref::iota(n);
  std::shuffle(perm.begin(), perm.end(), gen);
  PolicyConfig cfg;
  const double eps[] = {0.1, 0.2, 0.25, 0.3};
  cfg.epsilon = eps[gen() % 4];
  return {scale_instance(m, n, rows), ArrivalOrder{perm, 0},
          UtilitySpec::uniform(Power{p}, m), cfg};
}

TEST(PolicyProperty, SkipInvariantAndRevenueAccounting) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Case c = random_case(gen, trial % 2 ? 0.5 : 0.9);
    const std::size_t n = c.inst.arrivals();
    const std::size_t skip = resolve_points(n, c.cfg.epsilon).front();
    for (const RunResult& r : {run_ola(c.inst, c.order, c.spec, c.cfg, {}),
                               run_dla(c.inst, c.order, c.spec, c.cfg, {})}) {
      for (std::size_t t = 0; t < skip; ++t) EXPECT_EQ(r.decisions[t], kUnallocated);
      std::vector<double> u(c.inst.bidders(), 0.0);
      for (std::size_t t = 0; t < n; ++t)
        if (r.decisions[t] != kUnallocated)
          u[r.decisions[t]] += c.inst.bid(r.decisions[t], c.order.permutation[t]);
      EXPECT_NEAR(c.spec.total(u), r.revenue, 1e-9 * std::max(1.0, r.revenue));
    }
  }
}

TEST(PolicyProperty, LinearUtilitiesCollapse) {
  std::mt19937_64 gen(32);
  for (int trial = 0; trial < 40; ++trial) {
    const Case c = random_case(gen, 1.0);
    const std::size_t skip = resolve_points(c.inst.arrivals(), c.cfg.epsilon).front();
    const RunResult ola = run_ola(c.inst, c.order, c.spec, c.cfg, {});
    const RunResult dla = run_dla(c.inst, c.order, c.spec, c.cfg, {});
    const RunResult my = run_myopic(c.inst, c.order, c.spec);
    for (std::size_t t = skip; t < c.inst.arrivals(); ++t) {
      EXPECT_EQ(ola.decisions[t], my.decisions[t]);
      EXPECT_EQ(dla.decisions[t], my.decisions[t]);
    }
  }
}

TEST(PolicyProperty, ConcavitySegmentBound) {
  std::mt19937_64 gen(33);
  for (int trial = 0; trial < 40; ++trial) {
    const Case c = random_case(gen, trial % 2 ? 0.5 : 0.9);
    const RunResult r = run_dla(c.inst, c.order, c.spec, c.cfg, {});
    EXPECT_GE(segment_concavity_slack(r, c.spec), -1e-9);
    // Independent evaluation from the segment accumulators.
    const double n = static_cast<double>(c.inst.arrivals());
    const double p = std::get<Power>(c.spec.at(0)).p;
    double rhs = 0.0;
    for (const Segment& s : r.segments) {
      const double a = static_cast<double>(s.end - s.begin) / n;
      for (double v : s.u) rhs += a * std::pow(v / a, p);
    }
    EXPECT_GE(r.revenue - rhs, -1e-9);
  }
}

TEST(PolicyProperty, RevenueBoundedByOffline) {
  std::mt19937_64 gen(34);
  for (int trial = 0; trial < 40; ++trial) {
    const Case c = random_case(gen, trial % 2 ? 0.5 : 0.9);
    SolverConfig scfg;
    scfg.rel_tol = 1e-9;
    const double opt = run_offline(c.inst, c.spec, scfg);
    for (const RunResult& r : {run_ola(c.inst, c.order, c.spec, c.cfg, {}),
                               run_dla(c.inst, c.order, c.spec, c.cfg, {}),
                               run_myopic(c.inst, c.order, c.spec)}) {
      const double rl = relative_loss(r.revenue, opt);
      EXPECT_GT(rl, kRelativeLossFloor);
      EXPECT_LE(rl, 1.0);
    }
  }
}

TEST(PolicyProperty, MyopicOrderInvariantAndRunsDeterministic) {
  std::mt19937_64 gen(35);
  for (int trial = 0; trial < 30; ++trial) {
    const Case c = random_case(gen, 0.7);
    const std::size_t n = c.inst.arrivals();
    const RunResult a = run_myopic(c.inst, c.order, c.spec);
    const RunResult b = run_myopic(c.inst, ArrivalOrder::identity(n), c.spec);
    EXPECT_NEAR(a.revenue, b.revenue, 1e-12 * std::max(1.0, a.revenue));
    const RunResult d1 = run_dla(c.inst, c.order, c.spec, c.cfg, {});
    const RunResult d2 = run_dla(c.inst, c.order, c.spec, c.cfg, {});
    EXPECT_EQ(d1.decisions, d2.decisions);
    EXPECT_EQ(d1.u_final, d2.u_final);
  }
}

TEST(PolicyProperty, PrefixAllocationTracksSolvedShares) {
  // On perturbed inputs the rule-based prefix allocation differs from the
  // fractional optimum by at most m bids per bidder.
  std::mt19937_64 gen(36);
  for (int trial = 0; trial < 40; ++trial) {
    Case c = random_case(gen, trial % 2 ? 0.5 : 0.9);
    Rng noise(static_cast<std::uint64_t>(trial));
    c.inst = apply_perturbation(c.inst, 1e-6, noise);
    const std::size_t m = c.inst.bidders(), n = c.inst.arrivals();
    SolverConfig scfg;
    scfg.rel_tol = 1e-10;
    const RunResult r = run_dla(c.inst, c.order, c.spec, c.cfg, scfg);
    for (const ResolveSnapshot& s : r.resolves) {
      std::vector<double> got(m, 0.0);
      for (std::size_t t = 0; t < s.prefix_len; ++t) {
        const auto col = c.inst.column(c.order.permutation[t]);
        const int who = allocate_rule(s.u_hat, col, c.spec);
        if (who != kUnallocated) got[who] += col[who];
      }
      const double share = static_cast<double>(s.prefix_len) / static_cast<double>(n);
      for (std::size_t i = 0; i < m; ++i)
        EXPECT_LE(std::abs(got[i] - share * s.u_hat[i]), static_cast<double>(m));
    }
  }
}

}  // namespace
}  // namespace cmatch
