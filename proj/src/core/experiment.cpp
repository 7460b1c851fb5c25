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

#include "core/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <system_error>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace softsensor {

namespace fs = std::filesystem;

namespace {

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

// "name.ext" for a single run, "name_<i>.ext" when there are several.
fs::path indexed(const fs::path& dir, const std::string& stem, const std::string& ext,
                 std::size_t i, std::size_t count) {
  if (count == 1) return dir / (stem + ext);
  return dir / (stem + "_" + std::to_string(i + 1) + ext);
}

void write_errors_csv(const fs::path& path, const ErrorSeries& errors) {
  std::string text = "t";
  const auto n = errors.abs_error.empty() ? 0 : errors.abs_error[0].size();
  for (Eigen::Index i = 0; i < n; ++i) text += ",err" + std::to_string(i + 1);
  text += ",rmse\n";
  const auto rmse = errors.rmse_over_states();
  for (std::size_t k = 0; k < errors.times.size(); ++k) {
    text += format_double(errors.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) text += ',' + format_double(errors.abs_error[k][i]);
    text += ',' + format_double(rmse[k]) + '\n';
  }
  write_text_file(path, text);
}

void check_checkpoint(const Checkpoint& checkpoint, const SystemModel& model) {
  const auto& params = checkpoint.params;
  if (params.n != model.n || params.m != model.m ||
      params.input_dim() != static_cast<std::size_t>(1 + model.p + model.m)) {
    fail(ErrorCode::kConfig,
         "checkpoint network (n=" + std::to_string(params.n) + ", m=" +
             std::to_string(params.m) + ", input " + std::to_string(params.input_dim()) +
             ") does not match model " + model.name + " (n=" + std::to_string(model.n) +
             ", m=" + std::to_string(model.m) + ", p=" + std::to_string(model.p) + ")");
  }
}

}  // namespace

const char* tool_version() { return SOFTSENSOR_VERSION; }

fs::path resolve_output_dir(const KeyValueConfig& config,
                            const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("SOFTSENSOR_OUT"); env && *env) return env;
  return config.get("output_dir").value_or("out");
}

nlohmann::json make_manifest(const std::string& command, const KeyValueConfig& config,
                             const ExperimentConfig& resolved) {
  nlohmann::json doc;
  doc["tool"] = kToolName;
  doc["version"] = tool_version();
  doc["command"] = command;
  doc["config"] = config.entries();
  doc["seeds"] = {{"train", resolved.train.seed},
                  {"noise", resolved.noise.seed},
                  {"test_noise", resolved.test_noise.seed}};
  if (resolved.train_sampling) doc["seeds"]["train_sampling"] = resolved.train_sampling->seed;
  return doc;
}

SimulateOutcome run_simulate(const KeyValueConfig& config, const fs::path& out) {
  const ExperimentConfig cfg = resolve_experiment(config);
  const SystemModel model = cfg.build_model();
  ensure_dir(out);
  SimulateOutcome outcome;
  const std::size_t count = cfg.x0s.size();
  for (std::size_t i = 0; i < count; ++i) {
    NoiseSpec noise = cfg.noise;
    noise.seed += i;
    outcome.trajectories.push_back(simulate(model, cfg.x0s[i], cfg.dt, cfg.horizon, noise));
    outcome.files.push_back(indexed(out, "trajectory", ".csv", i, count));
    write_trajectory_csv(outcome.files.back(), outcome.trajectories.back());
  }
  write_json(out / "manifest_simulate.json", make_manifest("simulate", config, cfg));
  return outcome;
}

TrainOutcome run_train(const KeyValueConfig& config, const fs::path& out,
                       const EpochCallback& on_epoch) {
  const ExperimentConfig cfg = resolve_experiment(config);
  const SystemModel model = cfg.build_model();
  ensure_dir(out);

  const TrainingDataset dataset =
      build_dataset(model, cfg.x0s, cfg.xhat0s, cfg.dt, cfg.horizon, cfg.noise);
  const InputScaling scaling{cfg.horizon};
  GainNetworkParams init =
      xavier_init(cfg.network_dims(model), model.n, model.m, cfg.train.seed);

  TrainConfig train_cfg = cfg.train;
  train_cfg.checkpoint_path.clear();
  TrainOutcome outcome;
  outcome.result = train(model, dataset, train_cfg, cfg.smc, scaling, std::move(init), on_epoch);
  for (const auto& record : outcome.result.history) {
    if (record.epoch == outcome.result.best_epoch) outcome.best = record.loss;
  }

  Checkpoint checkpoint;
  checkpoint.params = outcome.result.best;
  checkpoint.scaling = scaling;
  checkpoint.seed = cfg.train.seed;
  checkpoint.provenance = {{"model", model.name},
                           {"best_epoch", outcome.result.best_epoch},
                           {"best_loss", outcome.result.best_loss},
                           {"loss_residual", residual_units_name(cfg.train.residual_units)},
                           {"smc", {{"k0", cfg.smc.k0},
                                    {"alpha", cfg.smc.alpha},
                                    {"polarity", to_string(cfg.smc.polarity)}}}};
  outcome.checkpoint = out / "checkpoint.json";
  save_checkpoint(outcome.checkpoint, checkpoint);

  std::string history = "epoch,total,mse_d,mse_y,reg\n";
  for (const auto& record : outcome.result.history) {
    history += std::to_string(record.epoch) + ',' + format_double(record.loss.total) + ',' +
               format_double(record.loss.mse_d) + ',' + format_double(record.loss.mse_y) +
               ',' + format_double(record.loss.reg) + '\n';
  }
  outcome.history = out / "loss_history.csv";
  write_text_file(outcome.history, history);

  auto manifest = make_manifest("train", config, cfg);
  manifest["result"] = {{"best_epoch", outcome.result.best_epoch},
                        {"best_loss", outcome.result.best_loss},
                        {"epochs_run", outcome.result.history.size()},
                        {"stopped_early", outcome.result.stopped_early}};
  write_json(out / "manifest_train.json", manifest);
  return outcome;
}

TestOutcome run_test(const KeyValueConfig& config, const fs::path& checkpoint_path,
                     const fs::path& out) {
  const ExperimentConfig cfg = resolve_experiment(config);
  const SystemModel model = cfg.build_model();
  const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
  check_checkpoint(checkpoint, model);
  ensure_dir(out);

  const GainProvider gains = make_gain_provider(checkpoint.params, checkpoint.scaling);
  TestOutcome outcome;
  outcome.min_state_estimate = std::numeric_limits<double>::infinity();
  const std::size_t count = cfg.test_x0s.size();
  std::vector<MetricsReport> reports;
  std::string per_trajectory = "trajectory," + metrics_csv_header() + ",convergence_time_s\n";
  for (std::size_t i = 0; i < count; ++i) {
    NoiseSpec noise = cfg.test_noise;
    noise.seed += i;
    TestRun run;
    run.truth = simulate(model, cfg.test_x0s[i], cfg.dt, cfg.test_horizon, noise);
    run.estimate = run_observer(model, run.truth, gains, cfg.test_xhat0s[i], cfg.smc);
    for (const auto& x : run.estimate.states) {
      outcome.all_finite = outcome.all_finite && x.allFinite();
      outcome.min_state_estimate = std::min(outcome.min_state_estimate, x.minCoeff());
    }
    run.report = aggregate_metrics(run.truth, run.estimate, cfg.burn_in);
    run.report.convergence_time_s =
        convergence_time(run.report.errors, cfg.convergence_threshold, cfg.convergence_dwell);

    write_trajectory_csv(indexed(out, "truth", ".csv", i, count), run.truth);
    write_trajectory_csv(indexed(out, "estimate", ".csv", i, count), run.estimate,
                         CsvPrefixes{"xhat", "yhat", "u"});
    write_errors_csv(indexed(out, "errors", ".csv", i, count), run.report.errors);
    per_trajectory += std::to_string(i + 1) + ',' + metrics_csv_row(run.report) + ',' +
                      (run.report.convergence_time_s
                           ? format_double(*run.report.convergence_time_s)
                           : std::string()) +
                      '\n';
    reports.push_back(run.report);
    outcome.runs.push_back(std::move(run));
  }
  outcome.mean = mean_report(reports);

  nlohmann::json metrics;
  metrics["mean"] = report_to_json(outcome.mean);
  metrics["trajectories"] = nlohmann::json::array();
  for (const auto& r : reports) metrics["trajectories"].push_back(report_to_json(r));
  metrics["convergence_threshold"] = cfg.convergence_threshold;
  metrics["convergence_dwell_s"] = cfg.convergence_dwell;
  metrics["all_finite"] = outcome.all_finite;
  metrics["min_state_estimate"] = outcome.min_state_estimate;
  write_json(out / "metrics.json", metrics);
  write_text_file(out / "metrics.csv",
                  metrics_csv_header() + "\n" + metrics_csv_row(outcome.mean) + "\n");
  if (count > 1) write_text_file(out / "metrics_per_trajectory.csv", per_trajectory);

  auto manifest = make_manifest("test", config, cfg);
  manifest["checkpoint"] = checkpoint_path.string();
  write_json(out / "manifest_test.json", manifest);
  return outcome;
}

ObservabilityReport run_diagnose(const KeyValueConfig& config,
                                 const std::optional<Vector>& point, const fs::path& out) {
  const ExperimentConfig cfg = resolve_experiment(config);
  const SystemModel model = cfg.build_model();
  Vector x = point ? *point : cfg.diagnose_point.value_or(cfg.x0s.front());
  if (x.size() != model.n) {
    fail(ErrorCode::kConfig, "diagnose point needs " + std::to_string(model.n) + " entries");
  }
  const auto segment = segment_from_point(model, x, cfg.diagnose_horizon, cfg.dt);
  ObservabilityReport report = observability_matrix(model, segment, cfg.diagnose_horizon,
                                                    cfg.dt, "true trajectory from point");
  ensure_dir(out);
  auto doc = report_to_json(report);
  doc["model"] = model.name;
  doc["dt"] = cfg.dt;
  write_json(out / "diagnostics.json", doc);
  auto manifest = make_manifest("diagnose", config, cfg);
  manifest["point"] = to_std(x);
  write_json(out / "manifest_diagnose.json", manifest);
  return report;
}

MetricsReport run_metrics(const MetricsInputs& inputs, const fs::path& out) {
  const Trajectory truth = read_trajectory_csv(inputs.truth);
  Trajectory estimate;
  try {
    estimate = read_trajectory_csv(inputs.estimate, CsvPrefixes{"xhat", "yhat", "u"});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConfig) throw;
    estimate = read_trajectory_csv(inputs.estimate);
  }
  MetricsReport report = aggregate_metrics(truth, estimate, inputs.burn_in);
  report.convergence_time_s = convergence_time(report.errors, inputs.threshold, inputs.dwell);
  ensure_dir(out);
  write_json(out / "metrics.json", report_to_json(report));
  write_text_file(out / "metrics.csv",
                  metrics_csv_header() + "\n" + metrics_csv_row(report) + "\n");
  write_errors_csv(out / "errors.csv", report.errors);
  nlohmann::json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = tool_version();
  manifest["command"] = "metrics";
  manifest["truth"] = inputs.truth.string();
  manifest["estimate"] = inputs.estimate.string();
  manifest["burn_in_s"] = inputs.burn_in;
  manifest["convergence_threshold"] = inputs.threshold;
  manifest["convergence_dwell_s"] = inputs.dwell;
  write_json(out / "manifest_metrics.json", manifest);
  return report;
}

}  // namespace softsensor
