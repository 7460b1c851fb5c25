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

#ifndef SOFTSENSOR_CORE_TRAINING_HPP
#define SOFTSENSOR_CORE_TRAINING_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "core/gainnet.hpp"
#include "core/observer.hpp"
#include "core/systems.hpp"

namespace softsensor {

struct LossBreakdown {
  double total = 0.0;
  double mse_d = 0.0;  // dynamics residual of the estimate
  double mse_y = 0.0;  // output error
  double reg = 0.0;    // lambda * sum ||W_i||_F^2
};

/// Units of the dynamics residual in mse_d. kStep uses the per-step state
/// mismatch as written; kRate divides it by dt, comparing rates instead.
enum class ResidualUnits { kStep, kRate };

ResidualUnits parse_residual_units(const std::string& text);
const char* residual_units_name(ResidualUnits units);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double lambda = 1e-3;
  /// Steps per truncated-BPTT window; 0 backpropagates through the full
  /// horizon.
  std::size_t bptt_truncation = 0;
  ResidualUnits residual_units = ResidualUnits::kStep;
  std::uint64_t seed = 0;
  std::string checkpoint_path;

  void validate() const;
};

struct TrainingSample {
  Trajectory measured;  // only times, outputs and inputs enter the loss
  Vector xhat0;
};

struct TrainingDataset {
  std::vector<TrainingSample> samples;
  double dt = 0.0;

  void validate(const SystemModel& model) const;
};

TrainingDataset build_dataset(const SystemModel& model, const std::vector<Vector>& x0s,
                              const std::vector<Vector>& xhat0s, double dt,
                              double horizon, const NoiseSpec& noise);

/// Draws `count_x0` true initial states uniformly from [lo, hi]^n and
/// `count_xhat0` observer initial states likewise, and returns their
/// Cartesian product as aligned (x0, xhat0) lists.
std::pair<std::vector<Vector>, std::vector<Vector>> sample_initial_pairs(
    int n, std::pair<double, double> x0_range, std::pair<double, double> xhat0_range,
    int count_x0, int count_xhat0, std::uint64_t seed);

struct RolloutLoss {
  LossBreakdown loss;
  LayerTensors gradient;
};

/// Evaluates the observer-rollout loss and its exact gradient with respect to
/// every network parameter (backpropagation through time).
///
/// Per trajectory, mse_y averages ||y_k - h(xhat_k)||^2 over all N+1 samples
/// and mse_d averages ||xhat_{k+1} - xhat_k - dt f_c(xhat_k) - dt B u_k||^2
/// over the N transitions (divided by dt^2 under ResidualUnits::kRate);
/// both are then averaged over trajectories.
RolloutLoss rollout_loss(const GainNetworkParams& params, const SystemModel& model,
                         const TrainingDataset& dataset, const SmcConfig& smc,
                         const InputScaling& scaling, double lambda,
                         std::size_t bptt_truncation = 0,
                         ResidualUnits units = ResidualUnits::kStep);

struct AdamState {
  LayerTensors first_moment;
  LayerTensors second_moment;
  long step = 0;
};

AdamState adam_init(const GainNetworkParams& params);

void adam_step(GainNetworkParams& params, const LayerTensors& gradient,
               AdamState& state, const TrainConfig& cfg);

struct EpochRecord {
  std::size_t epoch = 0;
  LossBreakdown loss;
  double best_total = 0.0;
};

struct TrainResult {
  GainNetworkParams best;
  std::size_t best_epoch = 0;
  double best_loss = 0.0;
  std::vector<EpochRecord> history;
  std::vector<std::size_t> diverged_epochs;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Full-batch Adam on rollout_loss. Keeps the parameters with the lowest
/// total loss; saves them to cfg.checkpoint_path when set.
///
/// A diverged rollout discards the epoch, restores the previous parameters
/// and halves the learning rate once; a second divergence ends training.
TrainResult train(const SystemModel& model, const TrainingDataset& dataset,
                  const TrainConfig& cfg, const SmcConfig& smc,
                  const InputScaling& scaling, GainNetworkParams init,
                  const EpochCallback& on_epoch = {});

}  // namespace softsensor

#endif  // SOFTSENSOR_CORE_TRAINING_HPP
