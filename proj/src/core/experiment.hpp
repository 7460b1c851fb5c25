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

#ifndef SOFTSENSOR_CORE_EXPERIMENT_HPP
#define SOFTSENSOR_CORE_EXPERIMENT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/config.hpp"
#include "core/diagnostics.hpp"
#include "core/metrics.hpp"
#include "core/training.hpp"

namespace softsensor {

inline constexpr const char* kToolName = "softsensor";
const char* tool_version();

/// CLI flag > SOFTSENSOR_OUT > output_dir key.
std::filesystem::path resolve_output_dir(const KeyValueConfig& config,
                                         const std::optional<std::string>& flag);

/// Run record written as manifest_<command>.json next to the artifacts.
/// Contains no clock values so that repeated runs compare equal.
nlohmann::json make_manifest(const std::string& command, const KeyValueConfig& config,
                             const ExperimentConfig& resolved);

struct SimulateOutcome {
  std::vector<Trajectory> trajectories;
  std::vector<std::filesystem::path> files;
};

/// Simulates every training initial state with the training noise.
SimulateOutcome run_simulate(const KeyValueConfig& config, const std::filesystem::path& out);

struct TrainOutcome {
  TrainResult result;
  LossBreakdown best;
  std::filesystem::path checkpoint;
  std::filesystem::path history;
};

TrainOutcome run_train(const KeyValueConfig& config, const std::filesystem::path& out,
                       const EpochCallback& on_epoch = {});

struct TestRun {
  Trajectory truth;
  Trajectory estimate;
  MetricsReport report;
};

struct TestOutcome {
  std::vector<TestRun> runs;
  MetricsReport mean;
  double min_state_estimate = 0.0;
  bool all_finite = true;
};

/// Replays the observer with a trained gain network on fresh test
/// trajectories and scores the estimates.
TestOutcome run_test(const KeyValueConfig& config, const std::filesystem::path& checkpoint,
                     const std::filesystem::path& out);

/// Observability along the noise-free trajectory from `point` (default: the
/// configured diagnose.point, else the first training x0).
ObservabilityReport run_diagnose(const KeyValueConfig& config,
                                 const std::optional<Vector>& point,
                                 const std::filesystem::path& out);

struct MetricsInputs {
  std::filesystem::path truth;
  std::filesystem::path estimate;
  double burn_in = 0.0;
  double threshold = 1e-2;
  double dwell = 1.0;
};

/// Scores an estimate CSV against a truth CSV. The estimate's state columns
/// may be named xhat* or x*.
MetricsReport run_metrics(const MetricsInputs& inputs, const std::filesystem::path& out);

}  // namespace softsensor

#endif  // SOFTSENSOR_CORE_EXPERIMENT_HPP
