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

#include "softsensor/softsensor.h"

#include <algorithm>
#include <cstring>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/gainnet.hpp"
#include "core/systems.hpp"

struct ss_config {
  softsensor::KeyValueConfig config;
};

struct ss_model {
  softsensor::SystemModel model;
};

struct ss_trajectory {
  softsensor::Trajectory traj;
};

struct ss_network {
  softsensor::Checkpoint checkpoint;
};

namespace {

using softsensor::ErrorCode;

thread_local std::string last_error;

ss_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return SS_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDimensionMismatch: return SS_ERR_DIMENSION_MISMATCH;
    case ErrorCode::kConfig: return SS_ERR_CONFIG;
    case ErrorCode::kUnknownModel: return SS_ERR_UNKNOWN_MODEL;
    case ErrorCode::kIntegrationDiverged: return SS_ERR_INTEGRATION_DIVERGED;
    case ErrorCode::kObserverDiverged: return SS_ERR_OBSERVER_DIVERGED;
    case ErrorCode::kTrainingFailed: return SS_ERR_TRAINING_FAILED;
    case ErrorCode::kSingularSet: return SS_ERR_SINGULAR_SET;
    case ErrorCode::kIo: return SS_ERR_IO;
  }
  return SS_ERR_INTERNAL;
}

template <typename Fn>
ss_status guarded(Fn&& fn) {
  try {
    fn();
    return SS_OK;
  } catch (const softsensor::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SS_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SS_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* what) {
  if (!ptr) softsensor::fail(ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

void copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf && cap > 0) {
    const size_t count = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), count);
    buf[count] = '\0';
  }
}

softsensor::Vector to_vector(const double* data, int size) {
  if (size > 0) require(data, "vector argument");
  return softsensor::Vector(Eigen::Map<const softsensor::Vector>(data, size));
}

void fill_metrics(const softsensor::MetricsReport& r, ss_metrics_summary* out) {
  *out = ss_metrics_summary{};
  out->mse = r.mse;
  out->rmse = r.rmse;
  out->mae = r.mae;
  out->smape_percent = r.smape_percent;
  out->n = static_cast<int>(r.per_state_mae.size());
  for (int i = 0; i < std::min(out->n, SS_MAX_STATES); ++i) {
    out->per_state_mae[i] = r.per_state_mae[i];
  }
  out->samples = r.samples;
  out->burn_in_s = r.burn_in_s;
  out->converged = r.convergence_time_s.has_value();
  out->convergence_time_s = r.convergence_time_s.value_or(-1.0);
}

const std::vector<std::string>& presets() {
  static const std::vector<std::string> names = softsensor::preset_names();
  return names;
}

}  // namespace

extern "C" {

const char* ss_version(void) { return softsensor::tool_version(); }

const char* ss_last_error(void) { return last_error.c_str(); }

const char* ss_status_name(ss_status status) {
  switch (status) {
    case SS_OK: return "ok";
    case SS_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case SS_ERR_DIMENSION_MISMATCH: return "dimension-mismatch";
    case SS_ERR_CONFIG: return "config-error";
    case SS_ERR_UNKNOWN_MODEL: return "unknown-model";
    case SS_ERR_INTEGRATION_DIVERGED: return "integration-diverged";
    case SS_ERR_OBSERVER_DIVERGED: return "observer-diverged";
    case SS_ERR_TRAINING_FAILED: return "training-failed";
    case SS_ERR_SINGULAR_SET: return "singular-set";
    case SS_ERR_IO: return "io-error";
    case SS_ERR_INTERNAL: return "internal-error";
  }
  return "unknown-status";
}

int ss_exit_code(ss_status status) {
  switch (status) {
    case SS_OK: return 0;
    case SS_ERR_INVALID_ARGUMENT:
    case SS_ERR_DIMENSION_MISMATCH:
    case SS_ERR_CONFIG:
    case SS_ERR_UNKNOWN_MODEL: return 2;
    case SS_ERR_INTEGRATION_DIVERGED:
    case SS_ERR_OBSERVER_DIVERGED:
    case SS_ERR_TRAINING_FAILED:
    case SS_ERR_SINGULAR_SET: return 3;
    case SS_ERR_IO: return 4;
    default: return 1;
  }
}

size_t ss_preset_count(void) { return presets().size(); }

const char* ss_preset_name(size_t index) {
  return index < presets().size() ? presets()[index].c_str() : nullptr;
}

ss_status ss_config_new(ss_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ss_config{};
  });
}

ss_status ss_config_from_preset(const char* name, ss_config** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new ss_config{softsensor::preset(name)};
  });
}

ss_status ss_config_from_file(const char* path, ss_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ss_config{softsensor::KeyValueConfig::load(path)};
  });
}

ss_status ss_config_merge_file(ss_config* config, const char* path) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    config->config.merge(softsensor::KeyValueConfig::load(path));
  });
}

ss_status ss_config_set(ss_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    config->config.set(key, value, "--set " + std::string(key));
  });
}

ss_status ss_config_set_assignment(ss_config* config, const char* assignment) {
  return guarded([&] {
    require(config, "config");
    require(assignment, "assignment");
    const std::string text(assignment);
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      softsensor::fail(ErrorCode::kConfig, "expected key=value, got '" + text + "'");
    }
    std::string key = text.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    key.erase(0, key.find_first_not_of(" \t"));
    config->config.set(key, text.substr(eq + 1), "--set " + key);
  });
}

ss_status ss_config_get(const ss_config* config, const char* key, char* buf, size_t cap,
                        size_t* needed) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    copy_out(config->config.require(key), buf, cap, needed);
  });
}

ss_status ss_config_dump(const ss_config* config, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(config, "config");
    copy_out(config->config.dump(), buf, cap, needed);
  });
}

ss_status ss_config_validate(const ss_config* config) {
  return guarded([&] {
    require(config, "config");
    softsensor::resolve_experiment(config->config);
  });
}

ss_status ss_config_output_dir(const ss_config* config, const char* flag, char* buf,
                               size_t cap, size_t* needed) {
  return guarded([&] {
    require(config, "config");
    std::optional<std::string> cli;
    if (flag) cli = flag;
    copy_out(softsensor::resolve_output_dir(config->config, cli).string(), buf, cap, needed);
  });
}

void ss_config_free(ss_config* config) { delete config; }

ss_status ss_model_builtin(const char* name, ss_model** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new ss_model{softsensor::builtin_model(name)};
  });
}

ss_status ss_model_from_config(const ss_config* config, ss_model** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = new ss_model{softsensor::resolve_experiment(config->config).build_model()};
  });
}

ss_status ss_model_dims(const ss_model* model, int* n, int* m, int* p) {
  return guarded([&] {
    require(model, "model");
    if (n) *n = model->model.n;
    if (m) *m = model->model.m;
    if (p) *p = model->model.p;
  });
}

ss_status ss_model_euler_step(const ss_model* model, const double* x, const double* u,
                              double dt, double* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto& sys = model->model;
    if (!(dt > 0.0)) softsensor::fail(ErrorCode::kInvalidArgument, "dt must be positive");
    const softsensor::Vector next =
        softsensor::euler_step(sys, to_vector(x, sys.n), to_vector(u, sys.p), dt);
    std::copy(next.data(), next.data() + next.size(), out);
  });
}

ss_status ss_model_output(const ss_model* model, const double* x, double* y) {
  return guarded([&] {
    require(model, "model");
    require(y, "y");
    const softsensor::Vector out = model->model.output_map(to_vector(x, model->model.n));
    std::copy(out.data(), out.data() + out.size(), y);
  });
}

void ss_model_free(ss_model* model) { delete model; }

ss_status ss_simulate(const ss_model* model, const double* x0, double dt, double horizon,
                      ss_noise_target target, double stddev, uint64_t seed,
                      ss_trajectory** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    softsensor::NoiseSpec noise;
    switch (target) {
      case SS_NOISE_NONE: noise.target = softsensor::NoiseTarget::kNone; break;
      case SS_NOISE_MEASUREMENT: noise.target = softsensor::NoiseTarget::kMeasurement; break;
      case SS_NOISE_PROCESS: noise.target = softsensor::NoiseTarget::kProcess; break;
      default: softsensor::fail(ErrorCode::kInvalidArgument, "unknown noise target");
    }
    noise.stddev_scale = stddev;
    noise.seed = seed;
    *out = new ss_trajectory{
        softsensor::simulate(model->model, to_vector(x0, model->model.n), dt, horizon, noise)};
  });
}

ss_status ss_trajectory_read_csv(const char* path, ss_trajectory** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ss_trajectory{softsensor::read_trajectory_csv(path)};
  });
}

ss_status ss_trajectory_write_csv(const ss_trajectory* traj, const char* path) {
  return guarded([&] {
    require(traj, "trajectory");
    require(path, "path");
    softsensor::write_trajectory_csv(path, traj->traj);
  });
}

ss_status ss_trajectory_dims(const ss_trajectory* traj, size_t* samples, int* n, int* m,
                             int* p) {
  return guarded([&] {
    require(traj, "trajectory");
    const auto& t = traj->traj;
    if (samples) *samples = t.size();
    if (n) *n = t.size() ? static_cast<int>(t.states[0].size()) : 0;
    if (m) *m = t.size() ? static_cast<int>(t.outputs[0].size()) : 0;
    if (p) *p = t.size() ? static_cast<int>(t.inputs[0].size()) : 0;
  });
}

ss_status ss_trajectory_sample(const ss_trajectory* traj, size_t k, double* t, double* x,
                               double* y, double* u) {
  return guarded([&] {
    require(traj, "trajectory");
    const auto& tr = traj->traj;
    if (k >= tr.size()) softsensor::fail(ErrorCode::kInvalidArgument, "sample out of range");
    if (t) *t = tr.times[k];
    if (x) std::copy(tr.states[k].data(), tr.states[k].data() + tr.states[k].size(), x);
    if (y) std::copy(tr.outputs[k].data(), tr.outputs[k].data() + tr.outputs[k].size(), y);
    if (u) std::copy(tr.inputs[k].data(), tr.inputs[k].data() + tr.inputs[k].size(), u);
  });
}

void ss_trajectory_free(ss_trajectory* traj) { delete traj; }

ss_status ss_network_load(const char* path, ss_network** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ss_network{softsensor::load_checkpoint(path)};
  });
}

ss_status ss_network_save(const ss_network* net, const char* path) {
  return guarded([&] {
    require(net, "network");
    require(path, "path");
    softsensor::save_checkpoint(path, net->checkpoint);
  });
}

ss_status ss_network_dims(const ss_network* net, int* n, int* m, int* input_dim,
                          size_t* parameters) {
  return guarded([&] {
    require(net, "network");
    const auto& params = net->checkpoint.params;
    if (n) *n = params.n;
    if (m) *m = params.m;
    if (input_dim) *input_dim = static_cast<int>(params.input_dim());
    if (parameters) *parameters = params.parameter_count();
  });
}

ss_status ss_network_gain(const ss_network* net, double t, const double* u, const double* y,
                          double* gain) {
  return guarded([&] {
    require(net, "network");
    require(gain, "gain");
    const auto& params = net->checkpoint.params;
    const int p = static_cast<int>(params.input_dim()) - 1 - params.m;
    const auto z = softsensor::assemble_input(t, to_vector(u, p), to_vector(y, params.m),
                                              net->checkpoint.scaling);
    const softsensor::Vector flat = softsensor::flatten_gain(softsensor::forward(params, z).gain);
    std::copy(flat.data(), flat.data() + flat.size(), gain);
  });
}

void ss_network_free(ss_network* net) { delete net; }

ss_status ss_run_simulate(const ss_config* config, const char* out_dir,
                          ss_simulate_summary* summary) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    const auto outcome = softsensor::run_simulate(config->config, out_dir);
    if (summary) {
      const auto& first = outcome.trajectories.front();
      *summary = ss_simulate_summary{};
      summary->trajectories = outcome.trajectories.size();
      summary->samples = first.size();
      summary->n = static_cast<int>(first.states[0].size());
      summary->m = static_cast<int>(first.outputs[0].size());
      summary->p = static_cast<int>(first.inputs[0].size());
    }
  });
}

ss_status ss_run_train(const ss_config* config, const char* out_dir,
                       ss_epoch_callback on_epoch, void* user, ss_train_summary* summary) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    softsensor::EpochCallback callback;
    if (on_epoch) {
      callback = [on_epoch, user](const softsensor::EpochRecord& record) {
        const ss_epoch_info info{record.epoch,      record.loss.total, record.loss.mse_d,
                                 record.loss.mse_y, record.loss.reg,   record.best_total};
        on_epoch(&info, user);
      };
    }
    const auto outcome = softsensor::run_train(config->config, out_dir, callback);
    if (summary) {
      *summary = ss_train_summary{};
      summary->epochs_run = outcome.result.history.size();
      summary->best_epoch = outcome.result.best_epoch;
      summary->best_total = outcome.best.total;
      summary->best_mse_d = outcome.best.mse_d;
      summary->best_mse_y = outcome.best.mse_y;
      summary->best_reg = outcome.best.reg;
      summary->diverged_epochs = outcome.result.diverged_epochs.size();
      summary->stopped_early = outcome.result.stopped_early;
    }
  });
}

ss_status ss_run_test(const ss_config* config, const char* checkpoint, const char* out_dir,
                      ss_test_summary* summary) {
  return guarded([&] {
    require(config, "config");
    require(checkpoint, "checkpoint");
    require(out_dir, "out_dir");
    const auto outcome = softsensor::run_test(config->config, checkpoint, out_dir);
    if (summary) {
      *summary = ss_test_summary{};
      summary->trajectories = outcome.runs.size();
      fill_metrics(outcome.mean, &summary->mean);
      summary->min_state_estimate = outcome.min_state_estimate;
      summary->all_finite = outcome.all_finite;
    }
  });
}

ss_status ss_run_diagnose(const ss_config* config, const double* point, size_t point_len,
                          const char* out_dir, ss_diagnose_summary* summary, char* table,
                          size_t cap, size_t* needed) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    std::optional<softsensor::Vector> x;
    if (point) x = to_vector(point, static_cast<int>(point_len));
    const auto report = softsensor::run_diagnose(config->config, x, out_dir);
    if (summary) {
      *summary = ss_diagnose_summary{};
      summary->horizon = report.horizon;
      summary->rank = report.rank;
      summary->n = static_cast<int>(report.observability.cols());
      summary->rank_tolerance = report.rank_tolerance;
      const auto& sv = report.singular_values;
      summary->sigma_max = sv.size() ? sv[0] : 0.0;
      summary->sigma_min = sv.size() ? sv[sv.size() - 1] : 0.0;
      summary->gramian_lower = report.gramian_lower;
      summary->gramian_upper = report.gramian_upper;
    }
    copy_out(softsensor::format_table(report), table, cap, needed);
  });
}

ss_status ss_run_metrics(const char* truth_csv, const char* estimate_csv, double burn_in,
                         double threshold, double dwell, const char* out_dir,
                         ss_metrics_summary* summary) {
  return guarded([&] {
    require(truth_csv, "truth_csv");
    require(estimate_csv, "estimate_csv");
    require(out_dir, "out_dir");
    const auto report = softsensor::run_metrics(
        {truth_csv, estimate_csv, burn_in, threshold, dwell}, out_dir);
    if (summary) fill_metrics(report, summary);
  });
}

}  // extern "C"
