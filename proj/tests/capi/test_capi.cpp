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
#include <cstdio>
#include <string>
#include <vector>

#include "concave_match/concave_match.h"

namespace {

struct Owned {
  char* p = nullptr;
  ~Owned() { cm_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

const std::vector<double> kRows = {0.9, 0.4, 0.7, 0.5, 0.8, 0.6};

TEST(CApi, InstanceLifecycle) {
  cm_instance* inst = nullptr;
  ASSERT_EQ(cm_instance_from_rows(2, 3, kRows.data(), &inst), CM_OK);
  EXPECT_EQ(cm_instance_bidders(inst), 2u);
  EXPECT_EQ(cm_instance_arrivals(inst), 3u);
  double b = 0.0;
  EXPECT_EQ(cm_instance_bid(inst, 1, 2, &b), CM_OK);
  EXPECT_NEAR(b, 0.6 / 0.9, 1e-15);
  EXPECT_NEAR(cm_instance_scale_factor(inst), 0.9, 1e-15);
  EXPECT_EQ(cm_instance_bid(inst, 2, 0, &b), CM_ERR_ARGUMENT);
  EXPECT_NE(std::string(cm_last_error()), "");

  const std::string path = ::testing::TempDir() + "capi_inst.cmb";
  ASSERT_EQ(cm_instance_save(inst, path.c_str()), CM_OK);
  cm_instance* back = nullptr;
  ASSERT_EQ(cm_instance_load(path.c_str(), &back), CM_OK);
  std::vector<double> a(6), c(6);
  EXPECT_EQ(cm_instance_rows(inst, a.data(), a.size()), CM_OK);
  EXPECT_EQ(cm_instance_rows(back, c.data(), c.size()), CM_OK);
  EXPECT_EQ(a, c);
  EXPECT_EQ(cm_instance_rows(back, c.data(), 2), CM_ERR_ARGUMENT);
  std::remove(path.c_str());

  cm_instance* noisy = nullptr;
  EXPECT_EQ(cm_instance_perturb(inst, 1e-6, 4, &noisy), CM_OK);
  cm_instance_free(noisy);
  EXPECT_EQ(cm_instance_perturb(inst, -1.0, 4, &noisy), CM_ERR_ARGUMENT);
  cm_instance_free(back);
  cm_instance_free(inst);
  cm_instance_free(nullptr);
}

TEST(CApi, ErrorCodes) {
  cm_instance* inst = nullptr;
  const double zeros[2] = {0.0, 0.0};
  EXPECT_EQ(cm_instance_from_rows(1, 2, zeros, &inst), CM_ERR_DEGENERATE);
  EXPECT_EQ(inst, nullptr);
  const double neg[2] = {1.0, -1.0};
  EXPECT_EQ(cm_instance_from_rows(1, 2, neg, &inst), CM_ERR_VALIDATION);
  EXPECT_EQ(cm_instance_load("/nonexistent/file.csv", &inst), CM_ERR_IO);
  EXPECT_EQ(cm_instance_from_rows(1, 2, nullptr, &inst), CM_ERR_ARGUMENT);
  cm_utility* u = nullptr;
  EXPECT_EQ(cm_utility_power(2, 1.5, &u), CM_ERR_ARGUMENT);
  ASSERT_EQ(cm_utility_power(2, 0.5, &u), CM_OK);
  double v = 0.0;
  EXPECT_EQ(cm_utility_value(u, 0, -1.0, &v), CM_ERR_DOMAIN);
  cm_utility_free(u);
  cm_experiment* exp = nullptr;
  EXPECT_EQ(cm_experiment_parse("{}", &exp), CM_ERR_CONFIG);
  EXPECT_EQ(std::string(cm_last_error()), "missing generator.kind");
  EXPECT_STREQ(cm_status_name(CM_OK), "ok");
}

TEST(CApi, UtilityAndAllocation) {
  cm_utility* u = nullptr;
  ASSERT_EQ(cm_utility_power(2, 0.5, &u), CM_OK);
  double g = 0.0;
  EXPECT_EQ(cm_utility_grad(u, 0, 4.0, &g), CM_OK);
  EXPECT_DOUBLE_EQ(g, 0.25);
  const double w[2] = {1.0, 4.0}, q[2] = {1.0, 1.0}, z[2] = {0.0, 0.0};
  int who = 99;
  EXPECT_EQ(cm_allocate(u, w, q, 2, &who), CM_OK);
  EXPECT_EQ(who, 0);
  EXPECT_EQ(cm_allocate(u, w, z, 2, &who), CM_OK);
  EXPECT_EQ(who, CM_UNALLOCATED);
  EXPECT_EQ(cm_allocate(u, w, q, 3, &who), CM_ERR_ARGUMENT);
  cm_utility_free(u);

  cm_utility* mixed = nullptr;
  ASSERT_EQ(cm_utility_from_json(R"({"per_bidder":[{"power":0.5},{"log":true}]})", 2, &mixed),
            CM_OK);
  EXPECT_EQ(cm_utility_bidders(mixed), 2u);
  EXPECT_EQ(cm_utility_from_json(R"({"per_bidder":[{"power":0.5}]})", 2, &u), CM_ERR_CONFIG);
  cm_utility_free(mixed);
}

TEST(CApi, SolveOracleAndDual) {
  cm_instance* inst = nullptr;
  cm_utility* u = nullptr;
  ASSERT_EQ(cm_instance_from_rows(2, 3, kRows.data(), &inst), CM_OK);
  ASSERT_EQ(cm_utility_power(2, 0.5, &u), CM_OK);
  cm_solver_options opts = cm_solver_options_default();
  opts.rel_tol = 1e-9;
  cm_solution* sol = nullptr;
  ASSERT_EQ(cm_solve(inst, u, 3, 3, &opts, nullptr, &sol), CM_OK);
  double oracle = 0.0;
  ASSERT_EQ(cm_oracle(inst, u, 0.01, &oracle), CM_OK);
  // The API sees the instance rescaled by 1 / 0.9.
  EXPECT_NEAR(oracle, 2.169046312268 / std::sqrt(0.9), 1e-4);
  EXPECT_NEAR(cm_solution_objective(sol), oracle, 1e-4);
  std::vector<double> uh(2);
  ASSERT_EQ(cm_solution_u(sol, uh.data(), 2), CM_OK);
  double dual = 0.0;
  ASSERT_EQ(cm_dual_upper_bound(uh.data(), 2, inst, u, 3, 3, &dual), CM_OK);
  EXPECT_GE(dual, cm_solution_objective(sol) - 1e-12);
  EXPECT_NEAR(dual, cm_solution_dual_bound(sol), 1e-12);
  std::vector<double> x(6);
  EXPECT_EQ(cm_solution_x(sol, x.data(), x.size()), CM_OK);
  EXPECT_EQ(cm_solution_hit_iteration_cap(sol), 0);
  EXPECT_GT(cm_solution_iterations(sol), 0);
  cm_solution_free(sol);
  EXPECT_EQ(cm_solve(inst, u, 4, 3, &opts, nullptr, &sol), CM_ERR_ARGUMENT);
  double off = 0.0;
  EXPECT_EQ(cm_offline(inst, u, nullptr, &off), CM_OK);
  EXPECT_NEAR(off, oracle, 1e-4);
  cm_utility_free(u);
  cm_instance_free(inst);
}

TEST(CApi, PolicyRunAndReports) {
  std::vector<double> rows(3 * 200);
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = 0.1 + 0.9 * ((k * 37) % 101) / 100.0;
  cm_instance* inst = nullptr;
  cm_utility* u = nullptr;
  ASSERT_EQ(cm_instance_from_rows(3, 200, rows.data(), &inst), CM_OK);
  ASSERT_EQ(cm_utility_power(3, 0.9, &u), CM_OK);
  cm_policy_options pol = {"dla", 0.05, 0, 0.0};
  Owned json;
  ASSERT_EQ(cm_run_policy(inst, u, &pol, 7, nullptr, &json.p), CM_OK);
  EXPECT_NE(json.str().find("\"resolves\""), std::string::npos);
  Owned again;
  ASSERT_EQ(cm_run_policy(inst, u, &pol, 7, nullptr, &again.p), CM_OK);
  EXPECT_EQ(json.str(), again.str());
  cm_policy_options bad = {"dla", 0.7, 0, 0.0};
  Owned none;
  EXPECT_EQ(cm_run_policy(inst, u, &bad, 7, nullptr, &none.p), CM_ERR_CONFIG);

  Owned report;
  ASSERT_EQ(cm_condition_report(inst, u, 0.05, "dla", 7, nullptr, &report.p), CM_OK);
  EXPECT_NE(report.str().find("C_ola"), std::string::npos);
  Owned csv;
  double seg = -1.0, full = -1.0;
  ASSERT_EQ(cm_concentration_diagnostics(inst, u, 0.05, 7, nullptr, &csv.p, &seg, &full),
            CM_OK);
  EXPECT_GE(seg, 0.0);
  EXPECT_LE(full, 1.0);
  cm_utility_free(u);
  cm_instance_free(inst);
}

TEST(CApi, ExperimentAndSweep) {
  const char* doc =
      R"({"generator":{"kind":"category","m":4,"n":300,"k":10},"spec":{"power":0.8},)"
      R"("policies":[{"id":"dla","epsilon":0.05},{"id":"myopic"}],"runs":3,"base_seed":2})";
  cm_experiment* exp = nullptr;
  ASSERT_EQ(cm_experiment_parse(doc, &exp), CM_OK);
  Owned rendered;
  ASSERT_EQ(cm_experiment_render(exp, &rendered.p), CM_OK);
  cm_experiment* twin = nullptr;
  ASSERT_EQ(cm_experiment_parse(rendered.p, &twin), CM_OK);

  cm_summary* a = nullptr;
  cm_summary* b = nullptr;
  ASSERT_EQ(cm_experiment_run(exp, nullptr, 1, 0, &a), CM_OK);
  ASSERT_EQ(cm_experiment_run(twin, nullptr, 3, 0, &b), CM_OK);
  ASSERT_EQ(cm_summary_policy_count(a), 2u);
  Owned ca, cb;
  ASSERT_EQ(cm_summary_csv(a, &ca.p), CM_OK);
  ASSERT_EQ(cm_summary_csv(b, &cb.p), CM_OK);
  EXPECT_EQ(ca.str(), cb.str());
  double mean = 0, sd = 0, rev = 0, opt = 0;
  ASSERT_EQ(cm_summary_policy_stats(a, 1, &mean, &sd, &rev, &opt), CM_OK);
  EXPECT_GT(opt, 0.0);
  EXPECT_EQ(cm_summary_policy_stats(a, 2, &mean, &sd, &rev, &opt), CM_ERR_ARGUMENT);
  Owned jsonl;
  ASSERT_EQ(cm_summary_records_jsonl(a, 0, &jsonl.p), CM_OK);
  const std::string lines = jsonl.str();
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 6);

  cm_instance* inst = nullptr;
  ASSERT_EQ(cm_instance_generate(exp, 0, &inst), CM_OK);
  EXPECT_EQ(cm_instance_arrivals(inst), 300u);
  const double eps[] = {0.05, 0.1};
  cm_sweep* s1 = nullptr;
  cm_sweep* s2 = nullptr;
  ASSERT_EQ(cm_experiment_sweep(exp, "epsilon", eps, 2, nullptr, 2, &s1), CM_OK);
  ASSERT_EQ(cm_experiment_sweep(exp, "epsilon", eps, 2, nullptr, 1, &s2), CM_OK);
  Owned c1, c2, p1;
  ASSERT_EQ(cm_sweep_csv(s1, &c1.p), CM_OK);
  ASSERT_EQ(cm_sweep_csv(s2, &c2.p), CM_OK);
  const std::string table = c1.str();
  EXPECT_EQ(table, c2.str());
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);
  ASSERT_EQ(cm_sweep_plot_csv(s1, &p1.p), CM_OK);
  EXPECT_EQ(p1.str().rfind("x,series,mean,std\n", 0), 0u);
  cm_sweep* bad = nullptr;
  EXPECT_EQ(cm_experiment_sweep(exp, "m", eps, 2, nullptr, 1, &bad), CM_ERR_CONFIG);

  cm_sweep_free(s1);
  cm_sweep_free(s2);
  cm_instance_free(inst);
  cm_summary_free(a);
  cm_summary_free(b);
  cm_experiment_free(exp);
  cm_experiment_free(twin);
}

TEST(CApi, Version) { EXPECT_STREQ(cm_version(), "0.1.0"); }

}  // namespace
