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
#include <vector>

#include "core/error.hpp"
#include "core/instance.hpp"
#include "core/utility.hpp"
#include "solver/oracle.hpp"
#include "solver/solver.hpp"
#include "support.hpp"

namespace cmatch {
namespace {

// Frozen output of the brute-force oracle on the 2x3 fixture; the reference
// pairwise solver in support.hpp reproduces it to 12 digits.
constexpr double kFixtureOpt = 2.169046312268;

const std::vector<double> kFixtureRows = {0.9, 0.4, 0.7, 0.5, 0.8, 0.6};

Instance fixture() { return Instance::from_rows(2, 3, kFixtureRows); }

struct Random {
  ref::Matrix bids;
  Instance inst;
  double p;
};

Random random_instance(std::mt19937_64& gen, std::size_t max_m,
                       std::size_t max_n) {
  std::uniform_int_distribution<std::size_t> dm(1, max_m), dn(1, max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t m = dm(gen), n = dn(gen);
  ref::Matrix b{m, n, std::vector<double>(m * n)};
  for (double& v : b.v) v = unit(gen) < 0.2 ? 0.0 : unit(gen);
  b.v[0] += 0.05;
  Instance inst = scale_instance(m, n, b.v);
  b.v = inst.to_rows();
  return {b, inst, unit(gen) < 0.5 ? 0.5 : 0.9};
}

TEST(Solver, LinearPicksColumnMax) {
  const Instance inst = Instance::from_rows(2, 2, std::vector<double>{1, 0.2, 0.3, 0.8});
  const UtilitySpec lin = UtilitySpec::uniform(Power{1.0}, 2);
  const PrimalSolution s = solve_concave_program(inst, 2, 2, lin, {});
  EXPECT_NEAR(s.objective, 1.8, 1e-9);
  EXPECT_NEAR(s.u_hat[0], 1.0, 1e-9);
  EXPECT_NEAR(s.u_hat[1], 0.8, 1e-9);
  const std::vector<double> u = {1.0, 0.8};
  EXPECT_NEAR(dual_upper_bound(u, inst, 2, 2, lin), 1.8, 1e-12);
}

TEST(Solver, SingleBidderTakesEverything) {
  const Instance inst = Instance::from_rows(1, 4, std::vector<double>{0.2, 0.0, 1.0, 0.5});
  const UtilitySpec half = UtilitySpec::uniform(Power{0.5}, 1);
  const PrimalSolution s = solve_concave_program(inst, 2, 4, half, {});
  // Prefix of two columns scaled by n / l = 2.
  EXPECT_NEAR(s.u_hat[0], 2.0 * 0.2, 1e-12);
  EXPECT_NEAR(s.x[0], 1.0, 1e-12);
  const PrimalSolution full = solve_concave_program(inst, 4, 4, half, {});
  EXPECT_NEAR(full.u_hat[0], 1.7, 1e-12);
  EXPECT_NEAR(full.objective, std::sqrt(1.7), 1e-12);
}

TEST(Solver, FixtureMatchesOracle) {
  const UtilitySpec half = UtilitySpec::uniform(Power{0.5}, 2);
  SolverConfig cfg;
  cfg.rel_tol = 1e-9;
  const PrimalSolution s = solve_concave_program(fixture(), 3, 3, half, cfg);
  EXPECT_NEAR(s.objective, kFixtureOpt, 1e-4);
  const double dual = dual_upper_bound(s.u_hat, fixture(), 3, 3, half);
  EXPECT_GE(dual, s.objective - 1e-12);
  EXPECT_LE(dual - s.objective, 1e-4 * std::max(1.0, s.objective));
}

TEST(Solver, PowerDualConjugateTerm) {
  // With zero bids the dual reduces to sum_i (1 - p) u_i^p.
  const Instance inst = Instance::from_rows(2, 1, std::vector<double>{1.0, 0.0});
  const UtilitySpec p = UtilitySpec::uniform(Power{0.5}, 2);
  const std::vector<double> u = {4.0, 9.0};
  const DualSolution d = dual_solution(u, inst, ref::iota(1), 1, p);
  EXPECT_NEAR(d.y[0], 1.0 * 0.5 / 2.0, 1e-15);
  EXPECT_NEAR(d.objective, d.y[0] + 0.5 * 2.0, 1e-12);
}

TEST(Solver, Errors) {
  const UtilitySpec half = UtilitySpec::uniform(Power{0.5}, 2);
  EXPECT_THROW(solve_concave_program(fixture(), 0, 3, half, {}), Error);
  EXPECT_THROW(solve_concave_program(fixture(), 4, 3, half, {}), Error);
  const UtilitySpec wrong = UtilitySpec::uniform(Power{0.5}, 3);
  EXPECT_THROW(solve_concave_program(fixture(), 3, 3, wrong, {}), Error);
  EXPECT_THROW(dual_upper_bound(std::vector<double>{1.0}, fixture(), 3, 3, half),
               Error);
  SolverConfig bad;
  bad.rel_tol = 0.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Solver, IterationCapIsFlagged) {
  const UtilitySpec half = UtilitySpec::uniform(Power{0.5}, 2);
  SolverConfig cfg;
  cfg.rel_tol = 1e-15;
  cfg.max_iters = 1;
  const PrimalSolution s = solve_concave_program(fixture(), 3, 3, half, cfg);
  EXPECT_TRUE(s.hit_iteration_cap);
  EXPECT_EQ(s.iterations, 1);
}

TEST(Solver, TraceCsv) {
  const UtilitySpec half = UtilitySpec::uniform(Power{0.5}, 2);
  SolveTrace trace;
  solve_concave_program(fixture(), 3, 3, half, {}, trace.observer());
  ASSERT_GT(trace.size(), 0u);
  const std::string csv = trace.to_csv();
  EXPECT_EQ(csv.rfind("iter,objective,fw_gap,step_size\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')),
            trace.size() + 1);
}

TEST(SolverProperty, AgreesWithReferenceAndCertifies) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const Random r = random_instance(gen, 4, 6);
    const std::size_t n = r.inst.arrivals();
    const std::size_t l = 1 + trial % n;
    const UtilitySpec spec = UtilitySpec::uniform(Power{r.p}, r.inst.bidders());
    SolverConfig cfg;
    cfg.rel_tol = 1e-8;
    cfg.init = trial % 2 ? InitRule::kMyopic : InitRule::kUniform;

    double prev = -1.0;
    bool ascent = true, weak = true;
    const auto observe = [&](const SolverIterate& it) {
      ascent = ascent && it.objective >= prev - 1e-12 * std::max(1.0, prev);
      prev = it.objective;
      const double d = dual_upper_bound(it.u, r.inst, l, n, spec);
      weak = weak && d >= it.objective - 1e-8;
    };
    const PrimalSolution s = solve_concave_program(r.inst, l, n, spec, cfg, observe);
    EXPECT_TRUE(ascent) << "trial " << trial;
    EXPECT_TRUE(weak) << "trial " << trial;

    const std::vector<double> p(r.inst.bidders(), r.p);
    const auto expect = ref::concave_optimum(
        r.bids, p, ref::iota(l), static_cast<double>(n) / static_cast<double>(l));
    EXPECT_NEAR(s.objective, expect.objective, 1e-5 * std::max(1.0, expect.objective))
        << "trial " << trial;
    EXPECT_LE(s.dual_bound - s.objective, 1e-6 * std::max(1.0, s.objective));
    EXPECT_GE(s.gap_certificate, 0.0);

    // Feasibility and consistency of u_hat with x.
    const std::size_t m = r.inst.bidders();
    std::vector<double> u(m, 0.0);
    for (std::size_t j = 0; j < l; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double x = s.x[j * m + i];
        EXPECT_GE(x, -1e-12);
        col += x;
        u[i] += static_cast<double>(n) / static_cast<double>(l) * r.inst.bid(i, j) * x;
      }
      EXPECT_LE(col, 1.0 + 1e-9);
    }
    for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(u[i], s.u_hat[i], 1e-9);
  }
}

TEST(SolverProperty, DualSolutionIsFeasible) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unit(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Random r = random_instance(gen, 5, 8);
    const std::size_t m = r.inst.bidders(), n = r.inst.arrivals();
    const UtilitySpec spec = UtilitySpec::uniform(Power{r.p}, m);
    std::vector<double> u(m);
    for (double& v : u) v = unit(gen);
    const DualSolution d = dual_solution(u, r.inst, ref::iota(n), n, spec);
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_GE(d.y[j], 0.0);
      for (std::size_t i = 0; i < m; ++i)
        EXPECT_GE(d.y[j], r.inst.bid(i, j) * spec.grad(i, d.v[i]) - 1e-12);
    }
    // Any dual-feasible point bounds the reference optimum.
    const auto opt = ref::concave_optimum(r.bids, std::vector<double>(m, r.p),
                                          ref::iota(n), 1.0, 60);
    EXPECT_GE(d.objective, opt.objective - 1e-9);
  }
}

TEST(Oracle, LinearAndSingleBidder) {
  const Instance inst = Instance::from_rows(2, 2, std::vector<double>{1, 0.2, 0.3, 0.8});
  EXPECT_DOUBLE_EQ(brute_force_oracle(inst, UtilitySpec::uniform(Power{1.0}, 2), 0.05),
                   1.8);
  const Instance one = Instance::from_rows(1, 3, std::vector<double>{0.5, 0.25, 1.0});
  EXPECT_NEAR(brute_force_oracle(one, UtilitySpec::uniform(Power{0.5}, 1), 0.1),
              std::sqrt(1.75), 1e-12);
}

TEST(Oracle, FixtureGolden) {
  const double v =
      brute_force_oracle(fixture(), UtilitySpec::uniform(Power{0.5}, 2), 0.01);
  EXPECT_NEAR(v, kFixtureOpt, 1e-9);
  ref::Matrix b{2, 3, kFixtureRows};
  EXPECT_NEAR(ref::concave_optimum(b, {0.5, 0.5}, ref::iota(3), 1.0).objective,
              kFixtureOpt, 1e-9);
}

TEST(Oracle, SizeGuard) {
  const Instance big = Instance::from_rows(4, 1, std::vector<double>{1, 1, 1, 1});
  EXPECT_THROW(brute_force_oracle(big, UtilitySpec::uniform(Power{0.5}, 4), 0.1),
               Error);
  const Instance wide = Instance::from_rows(1, 6, std::vector<double>(6, 1.0));
  EXPECT_THROW(brute_force_oracle(wide, UtilitySpec::uniform(Power{0.5}, 1), 0.1),
               Error);
  EXPECT_THROW(brute_force_oracle(fixture(), UtilitySpec::uniform(Power{0.5}, 2), 0.6),
               Error);
}

}  // namespace
}  // namespace cmatch
