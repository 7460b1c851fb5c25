/*
 * Copyright 2026 The softsensor Authors.
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

/* C interface to the softsensor library: benchmark systems, neural-gain
 * sliding-mode observers, training, metrics and observability diagnostics.
 *
 * All functions return an ss_status. On failure a thread-local message is
 * available from ss_last_error() until the next failing call on the same
 * thread. Handles are opaque and must be released with the matching
 * *_free function; passing NULL to a *_free function is a no-op.
 *
 * Functions that fill a caller buffer take (buf, cap, needed): `needed`
 * receives the full length including the terminating NUL, and the text is
 * truncated to fit `cap`. */

#ifndef SOFTSENSOR_SOFTSENSOR_H
#define SOFTSENSOR_SOFTSENSOR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SOFTSENSOR_BUILDING)
#define SS_API __declspec(dllexport)
#else
#define SS_API __declspec(dllimport)
#endif
#else
#define SS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
  SS_OK = 0,
  SS_ERR_INVALID_ARGUMENT = 1,
  SS_ERR_DIMENSION_MISMATCH = 2,
  SS_ERR_CONFIG = 3,
  SS_ERR_UNKNOWN_MODEL = 4,
  SS_ERR_INTEGRATION_DIVERGED = 5,
  SS_ERR_OBSERVER_DIVERGED = 6,
  SS_ERR_TRAINING_FAILED = 7,
  SS_ERR_SINGULAR_SET = 8,
  SS_ERR_IO = 9,
  SS_ERR_INTERNAL = 10
} ss_status;

typedef enum ss_noise_target {
  SS_NOISE_NONE = 0,
  SS_NOISE_MEASUREMENT = 1,
  SS_NOISE_PROCESS = 2
} ss_noise_target;

#define SS_MAX_STATES 16

typedef struct ss_config ss_config;
typedef struct ss_model ss_model;
typedef struct ss_trajectory ss_trajectory;
typedef struct ss_network ss_network;

SS_API const char* ss_version(void);
SS_API const char* ss_last_error(void);
SS_API const char* ss_status_name(ss_status status);
/* Process exit code for a status: 0 ok, 2 configuration or argument error,
 * 3 numeric failure (divergence, failed training, singular point), 4 I/O,
 * 1 anything else. */
SS_API int ss_exit_code(ss_status status);

/* ---- configuration ---------------------------------------------------- */

SS_API size_t ss_preset_count(void);
SS_API const char* ss_preset_name(size_t index);

SS_API ss_status ss_config_new(ss_config** out);
SS_API ss_status ss_config_from_preset(const char* name, ss_config** out);
SS_API ss_status ss_config_from_file(const char* path, ss_config** out);
/* Later keys override earlier ones. */
SS_API ss_status ss_config_merge_file(ss_config* config, const char* path);
SS_API ss_status ss_config_set(ss_config* config, const char* key, const char* value);
/* Accepts "key=value". */
SS_API ss_status ss_config_set_assignment(ss_config* config, const char* assignment);
SS_API ss_status ss_config_get(const ss_config* config, const char* key, char* buf,
                               size_t cap, size_t* needed);
SS_API ss_status ss_config_dump(const ss_config* config, char* buf, size_t cap,
                                size_t* needed);
/* Resolves every key and reports the first problem. */
SS_API ss_status ss_config_validate(const ss_config* config);
/* --out flag (may be NULL) > SOFTSENSOR_OUT > output_dir key. */
SS_API ss_status ss_config_output_dir(const ss_config* config, const char* flag, char* buf,
                                      size_t cap, size_t* needed);
SS_API void ss_config_free(ss_config* config);

/* ---- systems ---------------------------------------------------------- */

SS_API ss_status ss_model_builtin(const char* name, ss_model** out);
/* The model an experiment config describes (tank constants, control). */
SS_API ss_status ss_model_from_config(const ss_config* config, ss_model** out);
SS_API ss_status ss_model_dims(const ss_model* model, int* n, int* m, int* p);
/* x + dt (f_c(x) + B u); x and out hold n values, u holds p values. */
SS_API ss_status ss_model_euler_step(const ss_model* model, const double* x, const double* u,
                                     double dt, double* out);
SS_API ss_status ss_model_output(const ss_model* model, const double* x, double* y);
SS_API void ss_model_free(ss_model* model);

SS_API ss_status ss_simulate(const ss_model* model, const double* x0, double dt,
                             double horizon, ss_noise_target target, double stddev,
                             uint64_t seed, ss_trajectory** out);
SS_API ss_status ss_trajectory_read_csv(const char* path, ss_trajectory** out);
SS_API ss_status ss_trajectory_write_csv(const ss_trajectory* traj, const char* path);
SS_API ss_status ss_trajectory_dims(const ss_trajectory* traj, size_t* samples, int* n,
                                    int* m, int* p);
/* Copies sample k: time, then n states, m outputs and p inputs (each
 * pointer may be NULL). */
SS_API ss_status ss_trajectory_sample(const ss_trajectory* traj, size_t k, double* t,
                                      double* x, double* y, double* u);
SS_API void ss_trajectory_free(ss_trajectory* traj);

/* ---- gain network ----------------------------------------------------- */

SS_API ss_status ss_network_load(const char* path, ss_network** out);
SS_API ss_status ss_network_save(const ss_network* net, const char* path);
SS_API ss_status ss_network_dims(const ss_network* net, int* n, int* m, int* input_dim,
                                 size_t* parameters);
/* Gain L (n x m, row-major) at time t for input u (p values) and output y
 * (m values). */
SS_API ss_status ss_network_gain(const ss_network* net, double t, const double* u,
                                 const double* y, double* gain);
SS_API void ss_network_free(ss_network* net);

/* ---- experiment runs -------------------------------------------------- */

typedef struct ss_simulate_summary {
  size_t trajectories;
  size_t samples;
  int n, m, p;
} ss_simulate_summary;

typedef struct ss_epoch_info {
  size_t epoch;
  double total, mse_d, mse_y, reg;
  double best_total;
} ss_epoch_info;

typedef void (*ss_epoch_callback)(const ss_epoch_info* info, void* user);

typedef struct ss_train_summary {
  size_t epochs_run;
  size_t best_epoch;
  double best_total, best_mse_d, best_mse_y, best_reg;
  size_t diverged_epochs;
  int stopped_early;
} ss_train_summary;

typedef struct ss_metrics_summary {
  double mse, rmse, mae, smape_percent;
  int n;
  double per_state_mae[SS_MAX_STATES];
  size_t samples;
  double burn_in_s;
  int converged;
  double convergence_time_s;
} ss_metrics_summary;

typedef struct ss_test_summary {
  size_t trajectories;
  ss_metrics_summary mean; /* per-trajectory metrics averaged */
  double min_state_estimate;
  int all_finite;
} ss_test_summary;

typedef struct ss_diagnose_summary {
  size_t horizon;
  size_t rank;
  int n;
  double rank_tolerance;
  double sigma_max, sigma_min;
  double gramian_lower, gramian_upper;
} ss_diagnose_summary;

/* Each run writes its artifacts and a manifest.json into out_dir. */
SS_API ss_status ss_run_simulate(const ss_config* config, const char* out_dir,
                                 ss_simulate_summary* summary);
SS_API ss_status ss_run_train(const ss_config* config, const char* out_dir,
                              ss_epoch_callback on_epoch, void* user,
                              ss_train_summary* summary);
SS_API ss_status ss_run_test(const ss_config* config, const char* checkpoint,
                             const char* out_dir, ss_test_summary* summary);
/* point may be NULL (configured point); table receives the text report. */
SS_API ss_status ss_run_diagnose(const ss_config* config, const double* point,
                                 size_t point_len, const char* out_dir,
                                 ss_diagnose_summary* summary, char* table, size_t cap,
                                 size_t* needed);
SS_API ss_status ss_run_metrics(const char* truth_csv, const char* estimate_csv,
                                double burn_in, double threshold, double dwell,
                                const char* out_dir, ss_metrics_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* SOFTSENSOR_SOFTSENSOR_H */
