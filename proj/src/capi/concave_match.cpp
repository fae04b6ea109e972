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

#include "concave_match/concave_match.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "config/config.hpp"
#include "core/allocation.hpp"
#include "core/error.hpp"
#include "core/instance.hpp"
#include "core/instance_io.hpp"
#include "core/rng.hpp"
#include "core/utility.hpp"
#include "datagen/generators.hpp"
#include "harness/conditions.hpp"
#include "harness/diagnostics.hpp"
#include "harness/experiment.hpp"
#include "policies/policies.hpp"
#include "solver/oracle.hpp"
#include "solver/solver.hpp"

struct cm_instance {
  cmatch::Instance value;
};

struct cm_utility {
  cmatch::UtilitySpec value;
};

struct cm_solution {
  cmatch::PrimalSolution value;
};

struct cm_experiment {
  cmatch::ExperimentConfig value;
};

struct cm_summary {
  cmatch::ExperimentConfig config;
  cmatch::SummaryStats value;
};

struct cm_sweep {
  std::vector<cmatch::SweepCell> cells;
};

namespace {

thread_local std::string g_last_error;

cm_status status_of(cmatch::ErrorKind kind) {
  switch (kind) {
    case cmatch::ErrorKind::kArgument:
      return CM_ERR_ARGUMENT;
    case cmatch::ErrorKind::kDomain:
      return CM_ERR_DOMAIN;
    case cmatch::ErrorKind::kValidation:
      return CM_ERR_VALIDATION;
    case cmatch::ErrorKind::kDegenerateInstance:
      return CM_ERR_DEGENERATE;
    case cmatch::ErrorKind::kConfiguration:
      return CM_ERR_CONFIG;
    case cmatch::ErrorKind::kNumeric:
      return CM_ERR_NUMERIC;
    case cmatch::ErrorKind::kIo:
      return CM_ERR_IO;
  }
  return CM_ERR_RUNTIME;
}

template <class F>
cm_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CM_OK;
  } catch (const cmatch::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CM_ERR_RUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CM_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return CM_ERR_RUNTIME;
  }
}

void need(const void* p, const char* what) {
  cmatch::require(p != nullptr, cmatch::ErrorKind::kArgument,
                  std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

cmatch::SolverConfig solver_config(const cm_solver_options* opts) {
  cmatch::SolverConfig cfg;
  if (opts) {
    cfg.rel_tol = opts->rel_tol;
    cfg.max_iters = opts->max_iters;
    cfg.init = opts->init == CM_INIT_MYOPIC ? cmatch::InitRule::kMyopic
                                            : cmatch::InitRule::kUniform;
  }
  cfg.validate();
  return cfg;
}

void check_sizes(const cm_instance* inst, const cm_utility* u) {
  need(inst, "instance");
  need(u, "utility");
  cmatch::require(u->value.size() == inst->value.bidders(),
                  cmatch::ErrorKind::kArgument,
                  "utility spec size does not match number of bidders");
}

// Experiment config adjusted to run on a supplied instance.
cmatch::ExperimentConfig for_instance(const cmatch::ExperimentConfig& base,
                                      const cm_instance* fixed) {
  cmatch::ExperimentConfig cfg = base;
  if (fixed) {
    cfg.generator.m = fixed->value.bidders();
    cfg.generator.n = fixed->value.arrivals();
    cfg.validate();
  }
  return cfg;
}

}  // namespace

extern "C" {

const char* cm_version(void) { return "0.1.0"; }

const char* cm_last_error(void) { return g_last_error.c_str(); }

const char* cm_status_name(cm_status status) {
  switch (status) {
    case CM_OK:
      return "ok";
    case CM_ERR_ARGUMENT:
      return "argument error";
    case CM_ERR_DOMAIN:
      return "domain error";
    case CM_ERR_VALIDATION:
      return "validation error";
    case CM_ERR_DEGENERATE:
      return "degenerate instance";
    case CM_ERR_CONFIG:
      return "configuration error";
    case CM_ERR_NUMERIC:
      return "numeric error";
    case CM_ERR_IO:
      return "i/o error";
    case CM_ERR_RUNTIME:
      return "runtime error";
  }
  return "unknown status";
}

void cm_string_free(char* s) { std::free(s); }

cm_solver_options cm_solver_options_default(void) {
  const cmatch::SolverConfig d;
  return {d.rel_tol, d.max_iters, CM_INIT_UNIFORM};
}

cm_status cm_instance_from_rows(size_t m, size_t n, const double* rows,
                                cm_instance** out) {
  return guarded([&] {
    need(rows, "rows");
    need(out, "out");
    cmatch::require(m >= 1 && n >= 1, cmatch::ErrorKind::kArgument,
                    "m and n must be >= 1");
    *out = new cm_instance{
        cmatch::scale_instance(m, n, std::span<const double>(rows, m * n))};
  });
}

cm_status cm_instance_load(const char* path, cm_instance** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new cm_instance{cmatch::load_instance(path)};
  });
}

cm_status cm_instance_save(const cm_instance* inst, const char* path) {
  return guarded([&] {
    need(inst, "instance");
    need(path, "path");
    cmatch::save_instance(inst->value, path);
  });
}

cm_status cm_instance_generate(const cm_experiment* exp, size_t replication,
                               cm_instance** out) {
  return guarded([&] {
    need(exp, "experiment");
    need(out, "out");
    *out = new cm_instance{cmatch::replication_instance(exp->value, replication)};
  });
}

cm_status cm_instance_perturb(const cm_instance* inst, double eta,
                              uint64_t seed, cm_instance** out) {
  return guarded([&] {
    need(inst, "instance");
    need(out, "out");
    cmatch::Rng rng(cmatch::derive_seed(seed, cmatch::kPerturbStream));
    *out = new cm_instance{cmatch::apply_perturbation(inst->value, eta, rng)};
  });
}

void cm_instance_free(cm_instance* inst) { delete inst; }

size_t cm_instance_bidders(const cm_instance* inst) {
  return inst ? inst->value.bidders() : 0;
}

size_t cm_instance_arrivals(const cm_instance* inst) {
  return inst ? inst->value.arrivals() : 0;
}

double cm_instance_scale_factor(const cm_instance* inst) {
  return inst ? inst->value.scale_factor() : 0.0;
}

cm_status cm_instance_bid(const cm_instance* inst, size_t i, size_t j,
                          double* out) {
  return guarded([&] {
    need(inst, "instance");
    need(out, "out");
    cmatch::require(i < inst->value.bidders() && j < inst->value.arrivals(),
                    cmatch::ErrorKind::kArgument, "bid index out of range");
    *out = inst->value.bid(i, j);
  });
}

cm_status cm_instance_rows(const cm_instance* inst, double* out, size_t len) {
  return guarded([&] {
    need(inst, "instance");
    need(out, "out");
    const auto rows = inst->value.to_rows();
    cmatch::require(len == rows.size(), cmatch::ErrorKind::kArgument,
                    "output length must equal m * n");
    std::copy(rows.begin(), rows.end(), out);
  });
}

cm_status cm_utility_power(size_t m, double p, cm_utility** out) {
  return guarded([&] {
    need(out, "out");
    cmatch::require(m >= 1, cmatch::ErrorKind::kArgument, "m must be >= 1");
    *out = new cm_utility{cmatch::UtilitySpec::uniform(cmatch::Power{p}, m)};
  });
}

cm_status cm_utility_from_json(const char* spec_json, size_t m,
                               cm_utility** out) {
  return guarded([&] {
    need(spec_json, "spec_json");
    need(out, "out");
    const auto desc = cmatch::parse_spec_json(spec_json);
    *out = new cm_utility{desc.build(m)};
  });
}

void cm_utility_free(cm_utility* u) { delete u; }

size_t cm_utility_bidders(const cm_utility* u) {
  return u ? u->value.size() : 0;
}

cm_status cm_utility_value(const cm_utility* u, size_t i, double x,
                           double* out) {
  return guarded([&] {
    need(u, "utility");
    need(out, "out");
    *out = u->value.value(i, x);
  });
}

cm_status cm_utility_grad(const cm_utility* u, size_t i, double x,
                          double* out) {
  return guarded([&] {
    need(u, "utility");
    need(out, "out");
    *out = u->value.grad(i, x);
  });
}

cm_status cm_allocate(const cm_utility* u, const double* w, const double* q,
                      size_t m, int* out) {
  return guarded([&] {
    need(u, "utility");
    need(w, "w");
    need(q, "q");
    need(out, "out");
    *out = cmatch::allocate_rule(std::span<const double>(w, m),
                                 std::span<const double>(q, m), u->value);
  });
}

cm_status cm_solve(const cm_instance* inst, const cm_utility* u,
                   size_t prefix_len, size_t horizon,
                   const cm_solver_options* opts, const char* trace_path,
                   cm_solution** out) {
  return guarded([&] {
    check_sizes(inst, u);
    need(out, "out");
    const auto cfg = solver_config(opts);
    cmatch::SolveTrace trace;
    auto sol = cmatch::solve_concave_program(
        inst->value, prefix_len, horizon, u->value, cfg,
        trace_path ? trace.observer() : cmatch::SolverObserver{});
    if (trace_path) cmatch::write_text_file(trace_path, trace.to_csv());
    *out = new cm_solution{std::move(sol)};
  });
}

void cm_solution_free(cm_solution* sol) { delete sol; }

double cm_solution_objective(const cm_solution* sol) {
  return sol ? sol->value.objective : 0.0;
}

double cm_solution_fw_gap(const cm_solution* sol) {
  return sol ? sol->value.fw_gap : 0.0;
}

double cm_solution_dual_bound(const cm_solution* sol) {
  return sol ? sol->value.dual_bound : 0.0;
}

double cm_solution_gap_certificate(const cm_solution* sol) {
  return sol ? sol->value.gap_certificate : 0.0;
}

int cm_solution_iterations(const cm_solution* sol) {
  return sol ? sol->value.iterations : 0;
}

int cm_solution_hit_iteration_cap(const cm_solution* sol) {
  return sol && sol->value.hit_iteration_cap ? 1 : 0;
}

cm_status cm_solution_u(const cm_solution* sol, double* out, size_t m) {
  return guarded([&] {
    need(sol, "solution");
    need(out, "out");
    cmatch::require(m == sol->value.u_hat.size(), cmatch::ErrorKind::kArgument,
                    "output length must equal the number of bidders");
    std::copy(sol->value.u_hat.begin(), sol->value.u_hat.end(), out);
  });
}

cm_status cm_solution_x(const cm_solution* sol, double* out, size_t len) {
  return guarded([&] {
    need(sol, "solution");
    need(out, "out");
    cmatch::require(len == sol->value.x.size(), cmatch::ErrorKind::kArgument,
                    "output length must equal prefix_len * m");
    std::copy(sol->value.x.begin(), sol->value.x.end(), out);
  });
}

cm_status cm_dual_upper_bound(const double* u_hat, size_t m,
                              const cm_instance* inst, const cm_utility* u,
                              size_t prefix_len, size_t horizon, double* out) {
  return guarded([&] {
    check_sizes(inst, u);
    need(u_hat, "u_hat");
    need(out, "out");
    *out = cmatch::dual_upper_bound(std::span<const double>(u_hat, m),
                                    inst->value, prefix_len, horizon,
                                    u->value);
  });
}

cm_status cm_oracle(const cm_instance* inst, const cm_utility* u,
                    double grid_step, double* out) {
  return guarded([&] {
    check_sizes(inst, u);
    need(out, "out");
    *out = cmatch::brute_force_oracle(inst->value, u->value, grid_step);
  });
}

cm_status cm_run_policy(const cm_instance* inst, const cm_utility* u,
                        const cm_policy_options* policy, uint64_t order_seed,
                        const cm_solver_options* opts, char** json_out) {
  return guarded([&] {
    check_sizes(inst, u);
    need(policy, "policy");
    need(policy->id, "policy id");
    need(json_out, "json_out");
    const cmatch::PolicyId id = cmatch::parse_policy(policy->id);
    cmatch::require(id != cmatch::PolicyId::kOffline,
                    cmatch::ErrorKind::kArgument,
                    "use cm_offline for the offline benchmark");
    cmatch::PolicyConfig cfg;
    cfg.epsilon = policy->epsilon;
    cfg.warmup_allocation = policy->warmup != 0;
    if (policy->perturb != 0.0) cfg.perturb = policy->perturb;
    if (id != cmatch::PolicyId::kMyopic) cfg.validate();
    const auto order =
        cmatch::sample_permutation(inst->value.arrivals(), order_seed);
    cmatch::Rng rng(cmatch::derive_seed(order_seed, cmatch::kPerturbStream));
    const auto run = cmatch::run_policy(id, inst->value, order, u->value, cfg,
                                        solver_config(opts), &rng);
    *json_out = dup_string(cmatch::run_result_json(run));
  });
}

cm_status cm_offline(const cm_instance* inst, const cm_utility* u,
                     const cm_solver_options* opts, double* out) {
  return guarded([&] {
    check_sizes(inst, u);
    need(out, "out");
    *out = cmatch::run_offline(inst->value, u->value, solver_config(opts));
  });
}

cm_status cm_experiment_parse(const char* json, cm_experiment** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new cm_experiment{cmatch::parse_config(json)};
  });
}

cm_status cm_experiment_render(const cm_experiment* exp, char** json_out) {
  return guarded([&] {
    need(exp, "experiment");
    need(json_out, "json_out");
    *json_out = dup_string(cmatch::render_config(exp->value));
  });
}

void cm_experiment_free(cm_experiment* exp) { delete exp; }

cm_status cm_experiment_run(const cm_experiment* exp, const cm_instance* fixed,
                            unsigned threads, int keep_decisions,
                            cm_summary** out) {
  return guarded([&] {
    need(exp, "experiment");
    need(out, "out");
    const auto cfg = for_instance(exp->value, fixed);
    cmatch::MonteCarloOptions opts;
    opts.threads = threads;
    opts.keep_decisions = keep_decisions != 0;
    opts.fixed_instance = fixed ? &fixed->value : nullptr;
    auto stats = cmatch::monte_carlo(cfg, opts);
    *out = new cm_summary{cfg, std::move(stats)};
  });
}

void cm_summary_free(cm_summary* s) { delete s; }

size_t cm_summary_policy_count(const cm_summary* s) {
  return s ? s->value.policies.size() : 0;
}

cm_status cm_summary_policy_stats(const cm_summary* s, size_t k,
                                  double* mean_rl, double* std_rl,
                                  double* mean_revenue, double* mean_opt) {
  return guarded([&] {
    need(s, "summary");
    cmatch::require(k < s->value.policies.size(), cmatch::ErrorKind::kArgument,
                    "policy index out of range");
    const auto& p = s->value.policies[k];
    if (mean_rl) *mean_rl = p.mean_rl;
    if (std_rl) *std_rl = p.std_rl;
    if (mean_revenue) *mean_revenue = p.mean_revenue;
    if (mean_opt) *mean_opt = p.mean_opt;
  });
}

cm_status cm_summary_csv(const cm_summary* s, char** out) {
  return guarded([&] {
    need(s, "summary");
    need(out, "out");
    *out = dup_string(cmatch::summary_csv(s->config, s->value));
  });
}

cm_status cm_summary_records_jsonl(const cm_summary* s, int with_decisions,
                                   char** out) {
  return guarded([&] {
    need(s, "summary");
    need(out, "out");
    *out = dup_string(cmatch::run_records_jsonl(s->value, with_decisions != 0));
  });
}

cm_status cm_experiment_sweep(const cm_experiment* exp, const char* axis,
                              const double* values, size_t count,
                              const cm_instance* fixed, unsigned threads,
                              cm_sweep** out) {
  return guarded([&] {
    need(exp, "experiment");
    need(axis, "axis");
    need(values, "values");
    need(out, "out");
    cmatch::require(count >= 1, cmatch::ErrorKind::kConfiguration,
                    "sweep needs at least one value");
    const auto cfg = for_instance(exp->value, fixed);
    cmatch::MonteCarloOptions opts;
    opts.threads = threads;
    opts.fixed_instance = fixed ? &fixed->value : nullptr;
    auto cells = cmatch::run_sweep(cfg, cmatch::parse_sweep_axis(axis),
                                   std::span<const double>(values, count),
                                   opts);
    *out = new cm_sweep{std::move(cells)};
  });
}

void cm_sweep_free(cm_sweep* s) { delete s; }

cm_status cm_sweep_csv(const cm_sweep* s, char** out) {
  return guarded([&] {
    need(s, "sweep");
    need(out, "out");
    *out = dup_string(cmatch::sweep_csv(s->cells));
  });
}

cm_status cm_sweep_plot_csv(const cm_sweep* s, char** out) {
  return guarded([&] {
    need(s, "sweep");
    need(out, "out");
    *out = dup_string(cmatch::plot_csv(s->cells));
  });
}

cm_status cm_condition_report(const cm_instance* inst, const cm_utility* u,
                              double epsilon, const char* policy,
                              uint64_t order_seed,
                              const cm_solver_options* opts, char** json_out) {
  return guarded([&] {
    check_sizes(inst, u);
    need(json_out, "json_out");
    cmatch::PolicyConfig cfg;
    cfg.epsilon = epsilon;
    cfg.validate();
    std::optional<cmatch::RunResult> run;
    if (policy) {
      const auto id = cmatch::parse_policy(policy);
      cmatch::require(id == cmatch::PolicyId::kOla ||
                          id == cmatch::PolicyId::kDla,
                      cmatch::ErrorKind::kArgument,
                      "condition report runs only ola or dla");
      const auto order =
          cmatch::sample_permutation(inst->value.arrivals(), order_seed);
      run = cmatch::run_policy(id, inst->value, order, u->value, cfg,
                               solver_config(opts), nullptr);
    }
    const auto report = cmatch::condition_report(
        inst->value, epsilon, u->value, run ? &*run : nullptr);
    *json_out = dup_string(cmatch::condition_report_json(report));
  });
}

cm_status cm_concentration_diagnostics(const cm_instance* inst,
                                       const cm_utility* u, double epsilon,
                                       uint64_t order_seed,
                                       const cm_solver_options* opts,
                                       char** csv_out,
                                       double* segment_violation_fraction,
                                       double* full_violation_fraction) {
  return guarded([&] {
    check_sizes(inst, u);
    need(csv_out, "csv_out");
    const auto order =
        cmatch::sample_permutation(inst->value.arrivals(), order_seed);
    const auto diag = cmatch::concentration_diagnostics(
        inst->value, order, epsilon, u->value, solver_config(opts));
    *csv_out = dup_string(cmatch::diagnostics_csv(diag));
    if (segment_violation_fraction) {
      *segment_violation_fraction = diag.segment_violation_fraction;
    }
    if (full_violation_fraction) {
      *full_violation_fraction = diag.full_horizon_violation_fraction;
    }
  });
}

}  // extern "C"
