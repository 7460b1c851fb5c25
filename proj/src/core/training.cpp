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

#include "core/training.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "core/error.hpp"

namespace softsensor {

ResidualUnits parse_residual_units(const std::string& text) {
  if (text == "step") return ResidualUnits::kStep;
  if (text == "rate") return ResidualUnits::kRate;
  fail(ErrorCode::kConfig, "unknown residual units '" + text + "' (expected step or rate)");
}

const char* residual_units_name(ResidualUnits units) {
  return units == ResidualUnits::kRate ? "rate" : "step";
}

void TrainConfig::validate() const {
  if (epochs < 1) fail(ErrorCode::kConfig, "train.epochs must be >= 1");
  if (!(learning_rate >= 0.0)) fail(ErrorCode::kConfig, "train.lr must be >= 0");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    fail(ErrorCode::kConfig, "adam betas must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) fail(ErrorCode::kConfig, "adam epsilon must be positive");
  if (!(lambda >= 0.0)) fail(ErrorCode::kConfig, "train.lambda must be >= 0");
}

void TrainingDataset::validate(const SystemModel& model) const {
  if (samples.empty()) fail(ErrorCode::kInvalidArgument, "training dataset is empty");
  if (!(dt > 0.0)) fail(ErrorCode::kInvalidArgument, "dataset dt must be positive");
  for (const auto& sample : samples) {
    sample.measured.validate();
    if (sample.measured.size() < 2) {
      fail(ErrorCode::kInvalidArgument, "training trajectory needs two samples");
    }
    if (sample.xhat0.size() != model.n || sample.measured.outputs[0].size() != model.m ||
        sample.measured.inputs[0].size() != model.p) {
      fail(ErrorCode::kDimensionMismatch, "training sample does not match model");
    }
  }
}

TrainingDataset build_dataset(const SystemModel& model, const std::vector<Vector>& x0s,
                              const std::vector<Vector>& xhat0s, double dt,
                              double horizon, const NoiseSpec& noise) {
  if (x0s.empty() || x0s.size() != xhat0s.size()) {
    fail(ErrorCode::kInvalidArgument, "x0 and xhat0 sets must be nonempty and aligned");
  }
  TrainingDataset dataset;
  dataset.dt = dt;
  for (std::size_t i = 0; i < x0s.size(); ++i) {
    NoiseSpec per_run = noise;
    per_run.seed = noise.seed + i;
    dataset.samples.push_back({simulate(model, x0s[i], dt, horizon, per_run), xhat0s[i]});
  }
  dataset.validate(model);
  return dataset;
}

std::pair<std::vector<Vector>, std::vector<Vector>> sample_initial_pairs(
    int n, std::pair<double, double> x0_range, std::pair<double, double> xhat0_range,
    int count_x0, int count_xhat0, std::uint64_t seed) {
  if (n < 1 || count_x0 < 1 || count_xhat0 < 1) {
    fail(ErrorCode::kInvalidArgument, "sample counts and dimension must be positive");
  }
  if (!(x0_range.first <= x0_range.second) || !(xhat0_range.first <= xhat0_range.second)) {
    fail(ErrorCode::kInvalidArgument, "sampling range is inverted");
  }
  std::mt19937_64 rng(seed);
  auto draw = [&](std::pair<double, double> range) {
    std::uniform_real_distribution<double> uniform(range.first, range.second);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(rng);
    return v;
  };
  std::vector<Vector> truths, guesses;
  for (int i = 0; i < count_x0; ++i) truths.push_back(draw(x0_range));
  for (int i = 0; i < count_xhat0; ++i) guesses.push_back(draw(xhat0_range));

  std::pair<std::vector<Vector>, std::vector<Vector>> pairs;
  for (const auto& x0 : truths) {
    for (const auto& xhat0 : guesses) {
      pairs.first.push_back(x0);
      pairs.second.push_back(xhat0);
    }
  }
  return pairs;
}

namespace {

struct TrajectoryTerms {
  double mse_y = 0.0;
  double mse_d = 0.0;
};

// Forward rollout and adjoint sweep for one trajectory. Accumulates the
// network-output gradient into d_gains (one column per step), weighted by
// `weight`.
TrajectoryTerms rollout_one(const GainNetworkParams& params, const SystemModel& model,
                            const TrainingSample& sample, double dt,
                            const SmcConfig& smc, const InputScaling& scaling,
                            std::size_t truncation, ResidualUnits units, double weight,
                            ForwardCache& cache, Matrix& d_gains) {
  const Trajectory& traj = sample.measured;
  const std::size_t steps = traj.size() - 1;
  const int n = model.n;
  const int m = model.m;
  const bool project = model.nonnegative;

  Matrix inputs(params.input_dim(), static_cast<Eigen::Index>(steps));
  for (std::size_t k = 0; k < steps; ++k) {
    inputs.col(k) = assemble_input(traj.times[k], traj.inputs[k], traj.outputs[k], scaling);
  }
  const Matrix flat_gains = forward_batch(params, inputs, &cache);

  std::vector<Vector> xhat(steps + 1);
  std::vector<Vector> surface(steps);
  std::vector<Vector> residual(steps);      // d_k
  std::vector<Vector> output_error(steps + 1);  // r_k = y_k - h(xhat_k)
  std::vector<Matrix> gains(steps);

  ObserverState state;
  state.xhat = project ? project_nonnegative(sample.xhat0) : sample.xhat0;
  xhat[0] = state.xhat;
  TrajectoryTerms terms;
  for (std::size_t k = 0; k < steps; ++k) {
    gains[k] = reshape_gain(flat_gains.col(k), n, m);
    const Vector& prev = xhat[k];
    state = observer_step(model, state, gains[k], traj.outputs[k], traj.inputs[k], dt,
                          smc, project);
    xhat[k + 1] = state.xhat;
    surface[k] = state.last_surface;
    output_error[k] = state.last_surface;
    Vector predicted = prev + dt * model.drift(prev);
    predicted.noalias() += dt * (model.input_matrix * traj.inputs[k]);
    residual[k] = xhat[k + 1] - predicted;
    terms.mse_d += residual[k].squaredNorm();
    terms.mse_y += output_error[k].squaredNorm();
  }
  output_error[steps] = traj.outputs[steps] - model.output_map(xhat[steps]);
  terms.mse_y += output_error[steps].squaredNorm();
  const double inv_samples = 1.0 / static_cast<double>(steps + 1);
  const double inv_steps = 1.0 / static_cast<double>(steps);
  terms.mse_y *= inv_samples;
  const double rate_scale = units == ResidualUnits::kRate ? 1.0 / (dt * dt) : 1.0;
  terms.mse_d *= inv_steps * rate_scale;

  // Adjoint sweep. adjoint holds dLoss/dxhat_{k+1} on entry to iteration k.
  const double coef_y = -2.0 * weight * inv_samples;
  const double coef_d = 2.0 * weight * inv_steps * rate_scale;
  const double polarity = smc.polarity == SmcPolarity::kReaching ? -1.0 : 1.0;
  const Matrix& structure = model.output_structure;
  const Matrix identity = Matrix::Identity(n, n);

  auto direct_gradient = [&](std::size_t k, const Matrix& out_jac,
                             const Matrix* step_jac) {
    Vector g = coef_y * (out_jac.transpose() * output_error[k]);
    if (k >= 1) g += coef_d * residual[k - 1];
    if (step_jac) g -= coef_d * (step_jac->transpose() * residual[k]);
    return g;
  };

  Vector adjoint = direct_gradient(steps, model.output_jacobian(xhat[steps]), nullptr);
  d_gains.resize(static_cast<Eigen::Index>(n * m), static_cast<Eigen::Index>(steps));
  for (std::size_t k = steps; k-- > 0;) {
    Vector masked = adjoint;
    if (project) {
      for (int i = 0; i < n; ++i) {
        if (!(xhat[k + 1][i] > 0.0)) masked[i] = 0.0;
      }
    }
    // xhat_{k+1} = xhat_k + dt (f_c + B u + L s + polarity * nu(s))
    const Vector& s = surface[k];
    d_gains.col(k) = flatten_gain(dt * masked * s.transpose());

    const Matrix out_jac = model.output_jacobian(xhat[k]);
    const Matrix euler_jac = identity + dt * model.drift_jacobian(xhat[k]);
    Vector next_adjoint = direct_gradient(k, out_jac, &euler_jac);

    const bool crosses_window = truncation > 0 && (k + 1) % truncation == 0;
    if (!crosses_window) {
      const double k_bar = adaptive_gain(s, smc);
      const Vector th = s.array().tanh().matrix();
      const Vector sech2 = (1.0 - th.array().square()).matrix();
      // d nu / d s = -(H^T diag(sech^2) K + H^T tanh(s) (2 alpha s)^T)
      Matrix d_nu = structure.transpose() * (k_bar * sech2).asDiagonal();
      d_nu.noalias() += (structure.transpose() * th) * (2.0 * smc.alpha * s).transpose();
      d_nu *= -1.0;
      const Matrix d_surface = gains[k] + polarity * d_nu;  // d increment / d s
      // s = y - h(xhat) so ds/dxhat = -H
      const Matrix step_jac = euler_jac - dt * d_surface * out_jac;
      next_adjoint.noalias() += step_jac.transpose() * masked;
    }
    adjoint = std::move(next_adjoint);
  }
  return terms;
}

void accumulate(LayerTensors& into, const LayerTensors& add) {
  for (std::size_t i = 0; i < into.size(); ++i) {
    into[i].weights += add[i].weights;
    into[i].bias += add[i].bias;
  }
}

}  // namespace

RolloutLoss rollout_loss(const GainNetworkParams& params, const SystemModel& model,
                         const TrainingDataset& dataset, const SmcConfig& smc,
                         const InputScaling& scaling, double lambda,
                         std::size_t bptt_truncation, ResidualUnits units) {
  params.validate();
  dataset.validate(model);
  smc.validate();
  if (params.n != model.n || params.m != model.m ||
      params.input_dim() != static_cast<std::size_t>(1 + model.p + model.m)) {
    fail(ErrorCode::kDimensionMismatch, "network shape does not match model");
  }
  RolloutLoss result;
  result.gradient = zeros_like(params.layers);
  const double weight = 1.0 / static_cast<double>(dataset.samples.size());
  ForwardCache cache;
  Matrix d_gains;
  for (const auto& sample : dataset.samples) {
    const TrajectoryTerms terms = rollout_one(params, model, sample, dataset.dt, smc,
                                              scaling, bptt_truncation, units, weight, cache,
                                              d_gains);
    result.loss.mse_y += weight * terms.mse_y;
    result.loss.mse_d += weight * terms.mse_d;
    accumulate(result.gradient, backward_batch(params, cache, d_gains, nullptr));
  }
  result.loss.reg = lambda * weight_norm_squared(params.layers);
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    result.gradient[i].weights += 2.0 * lambda * params.layers[i].weights;
  }
  result.loss.total = result.loss.mse_d + result.loss.mse_y + result.loss.reg;
  return result;
}

AdamState adam_init(const GainNetworkParams& params) {
  return {zeros_like(params.layers), zeros_like(params.layers), 0};
}

void adam_step(GainNetworkParams& params, const LayerTensors& gradient,
               AdamState& state, const TrainConfig& cfg) {
  if (gradient.size() != params.layers.size() ||
      state.first_moment.size() != params.layers.size()) {
    fail(ErrorCode::kDimensionMismatch, "adam tensors do not match parameters");
  }
  state.step += 1;
  const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    param.array() -= cfg.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + cfg.epsilon);
  };
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    update(params.layers[i].weights, gradient[i].weights, state.first_moment[i].weights,
           state.second_moment[i].weights);
    update(params.layers[i].bias, gradient[i].bias, state.first_moment[i].bias,
           state.second_moment[i].bias);
  }
}

TrainResult train(const SystemModel& model, const TrainingDataset& dataset,
                  const TrainConfig& cfg, const SmcConfig& smc,
                  const InputScaling& scaling, GainNetworkParams init,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  TrainResult result;
  result.best = init;
  result.best_loss = std::numeric_limits<double>::infinity();

  GainNetworkParams params = std::move(init);
  AdamState adam = adam_init(params);
  TrainConfig step_cfg = cfg;
  bool halved = false;
  GainNetworkParams last_good_params;
  AdamState last_good_adam;
  bool have_last_good = false;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    RolloutLoss evaluation;
    try {
      evaluation = rollout_loss(params, model, dataset, smc, scaling, cfg.lambda,
                                cfg.bptt_truncation, cfg.residual_units);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kObserverDiverged) throw;
      result.diverged_epochs.push_back(static_cast<std::size_t>(epoch));
      if (!halved && have_last_good) {
        params = last_good_params;
        adam = last_good_adam;
        step_cfg.learning_rate *= 0.5;
        halved = true;
        continue;
      }
      if (result.history.empty()) {
        throw Error(ErrorCode::kTrainingFailed,
                    std::string("every epoch diverged: ") + e.what(),
                    static_cast<std::size_t>(epoch));
      }
      result.stopped_early = true;
      break;
    }
    if (evaluation.loss.total < result.best_loss) {
      result.best_loss = evaluation.loss.total;
      result.best = params;
      result.best_epoch = static_cast<std::size_t>(epoch);
    }
    EpochRecord record{static_cast<std::size_t>(epoch), evaluation.loss, result.best_loss};
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);

    last_good_params = params;
    last_good_adam = adam;
    have_last_good = true;
    adam_step(params, evaluation.gradient, adam, step_cfg);
  }

  if (!cfg.checkpoint_path.empty()) {
    Checkpoint checkpoint;
    checkpoint.params = result.best;
    checkpoint.scaling = scaling;
    checkpoint.seed = cfg.seed;
    save_checkpoint(cfg.checkpoint_path, checkpoint);
  }
  return result;
}

}  // namespace softsensor
