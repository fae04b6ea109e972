/* Copyright 2026 The concave-match Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the concave-match library.
 *
 * Every fallible call returns a cm_status. On failure the message of the
 * most recent error on the calling thread is available from
 * cm_last_error(). Handles are opaque and owned by the caller; release
 * them with the matching *_free function. Strings returned through char**
 * out-parameters are released with cm_string_free. */

#ifndef CONCAVE_MATCH_H_
#define CONCAVE_MATCH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CM_API __declspec(dllexport)
#else
#define CM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cm_status {
  CM_OK = 0,
  CM_ERR_ARGUMENT = 1,
  CM_ERR_DOMAIN = 2,
  CM_ERR_VALIDATION = 3,
  CM_ERR_DEGENERATE = 4,
  CM_ERR_CONFIG = 5,
  CM_ERR_NUMERIC = 6,
  CM_ERR_IO = 7,
  CM_ERR_RUNTIME = 8
} cm_status;

/* Returned by cm_allocate when every score is zero. */
#define CM_UNALLOCATED (-1)

typedef struct cm_instance cm_instance;
typedef struct cm_utility cm_utility;
typedef struct cm_solution cm_solution;
typedef struct cm_experiment cm_experiment;
typedef struct cm_summary cm_summary;
typedef struct cm_sweep cm_sweep;

typedef enum cm_init_rule { CM_INIT_UNIFORM = 0, CM_INIT_MYOPIC = 1 } cm_init_rule;

typedef struct cm_solver_options {
  double rel_tol;
  int max_iters;
  cm_init_rule init;
} cm_solver_options;

typedef struct cm_policy_options {
  /* "ola", "dla" or "myopic". */
  const char* id;
  double epsilon;
  int warmup;
  /* Perturbation size; 0 disables it. */
  double perturb;
} cm_policy_options;

CM_API const char* cm_version(void);
CM_API const char* cm_last_error(void);
CM_API const char* cm_status_name(cm_status status);
CM_API void cm_string_free(char* s);
CM_API cm_solver_options cm_solver_options_default(void);

/* Instances. rows is bidder-major (rows[i * n + j]); the result is scaled
 * so that its largest bid is 1. */
CM_API cm_status cm_instance_from_rows(size_t m, size_t n, const double* rows,
                                       cm_instance** out);
CM_API cm_status cm_instance_load(const char* path, cm_instance** out);
/* Binary when the path ends in .cmb or .bin, CSV otherwise. */
CM_API cm_status cm_instance_save(const cm_instance* inst, const char* path);
/* Bids of replication `replication` of an experiment. */
CM_API cm_status cm_instance_generate(const cm_experiment* exp,
                                      size_t replication, cm_instance** out);
CM_API cm_status cm_instance_perturb(const cm_instance* inst, double eta,
                                     uint64_t seed, cm_instance** out);
CM_API void cm_instance_free(cm_instance* inst);
CM_API size_t cm_instance_bidders(const cm_instance* inst);
CM_API size_t cm_instance_arrivals(const cm_instance* inst);
CM_API double cm_instance_scale_factor(const cm_instance* inst);
CM_API cm_status cm_instance_bid(const cm_instance* inst, size_t i, size_t j,
                                 double* out);
/* Copies m * n bids, bidder-major. */
CM_API cm_status cm_instance_rows(const cm_instance* inst, double* out,
                                  size_t len);

/* Utilities. spec_json uses the "spec" grammar of experiment configs,
 * e.g. {"power": 0.9} or {"per_bidder": [{"log": true}, ...]}. */
CM_API cm_status cm_utility_power(size_t m, double p, cm_utility** out);
CM_API cm_status cm_utility_from_json(const char* spec_json, size_t m,
                                      cm_utility** out);
CM_API void cm_utility_free(cm_utility* u);
CM_API size_t cm_utility_bidders(const cm_utility* u);
CM_API cm_status cm_utility_value(const cm_utility* u, size_t i, double x,
                                  double* out);
CM_API cm_status cm_utility_grad(const cm_utility* u, size_t i, double x,
                                 double* out);
/* argmax_k q[k] M_k'(w[k]), lowest index on ties, CM_UNALLOCATED when
 * every score is zero. */
CM_API cm_status cm_allocate(const cm_utility* u, const double* w,
                             const double* q, size_t m, int* out);

/* Partial program over the first prefix_len arrival columns, projected to
 * horizon. trace_path, when not NULL, receives a per-iteration CSV. */
CM_API cm_status cm_solve(const cm_instance* inst, const cm_utility* u,
                          size_t prefix_len, size_t horizon,
                          const cm_solver_options* opts,
                          const char* trace_path, cm_solution** out);
CM_API void cm_solution_free(cm_solution* sol);
CM_API double cm_solution_objective(const cm_solution* sol);
CM_API double cm_solution_fw_gap(const cm_solution* sol);
CM_API double cm_solution_dual_bound(const cm_solution* sol);
CM_API double cm_solution_gap_certificate(const cm_solution* sol);
CM_API int cm_solution_iterations(const cm_solution* sol);
CM_API int cm_solution_hit_iteration_cap(const cm_solution* sol);
CM_API cm_status cm_solution_u(const cm_solution* sol, double* out, size_t m);
/* prefix_len * m entries, arrival-major. */
CM_API cm_status cm_solution_x(const cm_solution* sol, double* out,
                               size_t len);
CM_API cm_status cm_dual_upper_bound(const double* u_hat, size_t m,
                                     const cm_instance* inst,
                                     const cm_utility* u, size_t prefix_len,
                                     size_t horizon, double* out);
/* Enumerates small instances (m <= 3, n <= 5). */
CM_API cm_status cm_oracle(const cm_instance* inst, const cm_utility* u,
                           double grid_step, double* out);

/* Single policy run on the arrival order drawn from order_seed. The JSON
 * result holds decisions, u_final, revenue and the resolves. */
CM_API cm_status cm_run_policy(const cm_instance* inst, const cm_utility* u,
                               const cm_policy_options* policy,
                               uint64_t order_seed,
                               const cm_solver_options* opts,
                               char** json_out);
CM_API cm_status cm_offline(const cm_instance* inst, const cm_utility* u,
                            const cm_solver_options* opts, double* out);

/* Experiments. */
CM_API cm_status cm_experiment_parse(const char* json, cm_experiment** out);
CM_API cm_status cm_experiment_render(const cm_experiment* exp,
                                      char** json_out);
CM_API void cm_experiment_free(cm_experiment* exp);
/* fixed may be NULL; threads = 0 picks the default worker count. */
CM_API cm_status cm_experiment_run(const cm_experiment* exp,
                                   const cm_instance* fixed, unsigned threads,
                                   int keep_decisions, cm_summary** out);
CM_API void cm_summary_free(cm_summary* s);
CM_API size_t cm_summary_policy_count(const cm_summary* s);
CM_API cm_status cm_summary_policy_stats(const cm_summary* s, size_t k,
                                         double* mean_rl, double* std_rl,
                                         double* mean_revenue,
                                         double* mean_opt);
CM_API cm_status cm_summary_csv(const cm_summary* s, char** out);
CM_API cm_status cm_summary_records_jsonl(const cm_summary* s,
                                          int with_decisions, char** out);

/* axis is "epsilon", "n" or "power". */
CM_API cm_status cm_experiment_sweep(const cm_experiment* exp,
                                     const char* axis, const double* values,
                                     size_t count, const cm_instance* fixed,
                                     unsigned threads, cm_sweep** out);
CM_API void cm_sweep_free(cm_sweep* s);
CM_API cm_status cm_sweep_csv(const cm_sweep* s, char** out);
CM_API cm_status cm_sweep_plot_csv(const cm_sweep* s, char** out);

/* Sufficient-condition report. With policy "ola" or "dla" the policy is
 * also run on the order drawn from order_seed and its resolves checked;
 * policy may be NULL. */
CM_API cm_status cm_condition_report(const cm_instance* inst,
                                     const cm_utility* u, double epsilon,
                                     const char* policy, uint64_t order_seed,
                                     const cm_solver_options* opts,
                                     char** json_out);
/* Per (bidder, resolve) envelope table of a dynamic-learning run. */
CM_API cm_status cm_concentration_diagnostics(
    const cm_instance* inst, const cm_utility* u, double epsilon,
    uint64_t order_seed, const cm_solver_options* opts, char** csv_out,
    double* segment_violation_fraction, double* full_violation_fraction);

#ifdef __cplusplus
}
#endif

#endif /* CONCAVE_MATCH_H_ */
