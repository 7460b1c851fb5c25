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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/training.hpp"
#include "test_util.hpp"

namespace softsensor {
namespace {

struct Fixture {
  SystemModel model;
  TrainingDataset dataset;
  GainNetworkParams params;
  InputScaling scaling;
};

// Short harmonic rollout with a small randomized network.
Fixture harmonic_fixture(double horizon, std::uint64_t seed) {
  Fixture f;
  f.model = builtin_model("harmonic");
  f.dataset = build_dataset(f.model, {Vector{{2.0, -1.0, 3.0}}}, {Vector{{1.0, 1.0, 2.0}}},
                            0.01, horizon, NoiseSpec{});
  f.params = xavier_init({3, 8, 8, 3}, 3, 1, seed);
  std::mt19937_64 rng(seed + 1);
  for (auto& layer : f.params.layers) {
    layer.bias = test::random_vector(rng, static_cast<int>(layer.bias.size()), -0.3, 0.3);
  }
  f.scaling.time_scale = horizon;
  return f;
}

double total_loss(const Fixture& f, const GainNetworkParams& params, const SmcConfig& smc,
                  ResidualUnits units) {
  return rollout_loss(params, f.model, f.dataset, smc, f.scaling, 0.001, 0, units).loss.total;
}

void check_gradient(const Fixture& f, const SmcConfig& smc, ResidualUnits units) {
  const RolloutLoss eval = rollout_loss(f.params, f.model, f.dataset, smc, f.scaling, 0.001,
                                        0, units);
  const Vector analytic = flatten_parameters(eval.gradient);
  const Vector flat = flatten_parameters(f.params.layers);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(flat[i]));
    GainNetworkParams plus = f.params, minus = f.params;
    Vector fp = flat, fm = flat;
    fp[i] += h;
    fm[i] -= h;
    unflatten_parameters(fp, plus.layers);
    unflatten_parameters(fm, minus.layers);
    const double numeric =
        (total_loss(f, plus, smc, units) - total_loss(f, minus, smc, units)) / (2 * h);
    const double scale = std::max(std::abs(numeric), 1e-3 * analytic.cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(RolloutLoss, GradientMatchesFiniteDifferences) {
  const Fixture f = harmonic_fixture(0.05, 3);  // five steps
  ASSERT_EQ(f.dataset.samples[0].measured.size(), 6u);
  check_gradient(f, SmcConfig{}, ResidualUnits::kStep);
  check_gradient(f, SmcConfig{}, ResidualUnits::kRate);
  SmcConfig literal;
  literal.polarity = SmcPolarity::kLiteral;
  literal.alpha = 0.5;  // make the adaptive-gain path visible
  check_gradient(f, literal, ResidualUnits::kRate);
}

TEST(RolloutLoss, TruncatedGradientEqualsFullWhenWindowCoversHorizon) {
  const Fixture f = harmonic_fixture(0.05, 4);
  const auto full = rollout_loss(f.params, f.model, f.dataset, SmcConfig{}, f.scaling, 0.0, 0);
  const auto wide = rollout_loss(f.params, f.model, f.dataset, SmcConfig{}, f.scaling, 0.0, 50);
  const auto narrow =
      rollout_loss(f.params, f.model, f.dataset, SmcConfig{}, f.scaling, 0.0, 1);
  EXPECT_EQ(flatten_parameters(full.gradient), flatten_parameters(wide.gradient));
  EXPECT_EQ(full.loss.total, narrow.loss.total);
  EXPECT_NE(flatten_parameters(full.gradient), flatten_parameters(narrow.gradient));
}

TEST(RolloutLoss, ResidualIdentityAlongRollout) {
  const Fixture f = harmonic_fixture(1.0, 5);
  const SmcConfig smc;
  const TrainingSample& sample = f.dataset.samples[0];
  const GainProvider gains = make_gain_provider(f.params, f.scaling);
  const Trajectory est = run_observer(f.model, sample.measured, gains, sample.xhat0, smc);

  // Correction terms rebuilt from the estimate alone.
  const double dt = f.dataset.dt;
  double correction = 0.0, output = 0.0;
  const std::size_t steps = est.size() - 1;
  for (std::size_t k = 0; k < steps; ++k) {
    const Vector s = sliding_surface(sample.measured.outputs[k], est.outputs[k]);
    const Matrix gain = gains(est.times[k], sample.measured.inputs[k],
                              sample.measured.outputs[k]);
    const Vector nu = smc_correction(s, smc, f.model.output_structure);
    correction += (gain * s - nu).squaredNorm();
  }
  for (std::size_t k = 0; k <= steps; ++k) {
    output += (sample.measured.outputs[k] - est.outputs[k]).squaredNorm();
  }
  correction /= static_cast<double>(steps);
  output /= static_cast<double>(steps + 1);

  const auto rate = rollout_loss(f.params, f.model, f.dataset, smc, f.scaling, 0.0, 0,
                                 ResidualUnits::kRate);
  const auto step = rollout_loss(f.params, f.model, f.dataset, smc, f.scaling, 0.0, 0,
                                 ResidualUnits::kStep);
  EXPECT_NEAR(rate.loss.mse_d, correction, 1e-12 * correction);
  EXPECT_NEAR(step.loss.mse_d, dt * dt * correction, 1e-12 * dt * dt * correction);
  EXPECT_NEAR(rate.loss.mse_y, output, 1e-12 * output);
  EXPECT_EQ(rate.loss.mse_y, step.loss.mse_y);
}

TEST(RolloutLoss, PerfectObserverHasZeroDataLoss) {
  Fixture f = harmonic_fixture(1.0, 6);
  f.dataset.samples[0].xhat0 = Vector{{2.0, -1.0, 3.0}};
  for (ResidualUnits units : {ResidualUnits::kStep, ResidualUnits::kRate}) {
    const auto eval =
        rollout_loss(f.params, f.model, f.dataset, SmcConfig{}, f.scaling, 0.0, 0, units);
    EXPECT_EQ(eval.loss.mse_y, 0.0);
    EXPECT_EQ(eval.loss.mse_d, 0.0);
    EXPECT_EQ(eval.loss.reg, 0.0);
    EXPECT_EQ(eval.loss.total, 0.0);
  }
}

TEST(RolloutLoss, DecompositionAndRegularization) {
  const Fixture f = harmonic_fixture(0.5, 7);
  const auto eval = rollout_loss(f.params, f.model, f.dataset, SmcConfig{}, f.scaling, 0.001);
  EXPECT_EQ(eval.loss.total, eval.loss.mse_d + eval.loss.mse_y + eval.loss.reg);
  EXPECT_GT(eval.loss.reg, 0.0);
  EXPECT_DOUBLE_EQ(eval.loss.reg, 0.001 * weight_norm_squared(f.params.layers));
  EXPECT_GE(eval.loss.mse_d, 0.0);
  EXPECT_GE(eval.loss.mse_y, 0.0);
}

TEST(RolloutLoss, GroundTruthStatesAreNotConsumed) {
  Fixture f = harmonic_fixture(0.5, 8);
  const auto before = rollout_loss(f.params, f.model, f.dataset, SmcConfig{}, f.scaling, 0.001);
  for (auto& x : f.dataset.samples[0].measured.states) x.setConstant(123.0);
  const auto after = rollout_loss(f.params, f.model, f.dataset, SmcConfig{}, f.scaling, 0.001);
  EXPECT_EQ(before.loss.total, after.loss.total);
}

TEST(RolloutLoss, RejectsMismatchedNetwork) {
  const Fixture f = harmonic_fixture(0.05, 9);
  const GainNetworkParams wrong = xavier_init({4, 8, 3}, 3, 1, 1);
  try {
    rollout_loss(wrong, f.model, f.dataset, SmcConfig{}, f.scaling, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Adam, ZeroGradientAndMomentDecay) {
  GainNetworkParams params = xavier_init({2, 3, 1}, 1, 1, 1);
  const GainNetworkParams original = params;
  AdamState state = adam_init(params);
  EXPECT_TRUE(flatten_parameters(state.first_moment).isZero(0.0));
  EXPECT_TRUE(flatten_parameters(state.second_moment).isZero(0.0));
  TrainConfig cfg;
  adam_step(params, zeros_like(params.layers), state, cfg);
  EXPECT_EQ(flatten_parameters(params.layers), flatten_parameters(original.layers));

  LayerTensors ones = zeros_like(params.layers);
  for (auto& layer : ones) {
    layer.weights.setOnes();
    layer.bias.setOnes();
  }
  adam_step(params, ones, state, cfg);
  const Vector m = flatten_parameters(state.first_moment);
  const Vector v = flatten_parameters(state.second_moment);
  adam_step(params, zeros_like(params.layers), state, cfg);
  EXPECT_TRUE(flatten_parameters(state.first_moment).isApprox(cfg.beta1 * m, 1e-15));
  EXPECT_TRUE(flatten_parameters(state.second_moment).isApprox(cfg.beta2 * v, 1e-15));
}

TEST(Adam, FirstStepSizeIndependentOfGradientScale) {
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  for (double g : {1e-4, 1.0, 1e4}) {
    GainNetworkParams params = xavier_init({1, 1}, 1, 1, 1);
    params.layers[0].weights(0, 0) = 0.0;
    AdamState state = adam_init(params);
    LayerTensors grad = zeros_like(params.layers);
    grad[0].weights(0, 0) = g;
    adam_step(params, grad, state, cfg);
    const double expected = -cfg.learning_rate * g / (g + cfg.epsilon);
    EXPECT_NEAR(params.layers[0].weights(0, 0), expected, 1e-15);
    EXPECT_NEAR(params.layers[0].weights(0, 0), -cfg.learning_rate, 1e-6);
  }
}

TEST(Train, ZeroLearningRateKeepsInitialParameters) {
  const Fixture f = harmonic_fixture(0.2, 10);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.learning_rate = 0.0;
  const TrainResult result = train(f.model, f.dataset, cfg, SmcConfig{}, f.scaling, f.params);
  ASSERT_EQ(result.history.size(), 5u);
  for (const auto& record : result.history) {
    EXPECT_EQ(record.loss.total, result.history[0].loss.total);
  }
  EXPECT_EQ(result.best_epoch, 0u);
  EXPECT_EQ(flatten_parameters(result.best.layers), flatten_parameters(f.params.layers));
}

TEST(Train, BestLossIsMonotoneAndDeterministic) {
  const Fixture f = harmonic_fixture(0.5, 11);
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.learning_rate = 0.01;
  std::vector<EpochRecord> seen;
  const TrainResult a = train(f.model, f.dataset, cfg, SmcConfig{}, f.scaling, f.params,
                              [&](const EpochRecord& r) { seen.push_back(r); });
  const TrainResult b = train(f.model, f.dataset, cfg, SmcConfig{}, f.scaling, f.params);
  ASSERT_EQ(seen.size(), a.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].loss.total, b.history[i].loss.total);
    EXPECT_EQ(a.history[i].loss.total,
              a.history[i].loss.mse_d + a.history[i].loss.mse_y + a.history[i].loss.reg);
    if (i > 0) EXPECT_LE(a.history[i].best_total, a.history[i - 1].best_total);
  }
  EXPECT_LT(a.best_loss, a.history[0].loss.total);
  EXPECT_EQ(a.best_loss, a.history[a.best_epoch].loss.total);
  EXPECT_EQ(flatten_parameters(a.best.layers), flatten_parameters(b.best.layers));
}

TEST(Train, ImmediateDivergenceFailsTraining) {
  Fixture f = harmonic_fixture(1.0, 12);
  f.params.layers.back().bias.setConstant(1e12);
  TrainConfig cfg;
  cfg.epochs = 3;
  try {
    train(f.model, f.dataset, cfg, SmcConfig{}, f.scaling, f.params);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTrainingFailed);
  }
}

TEST(Train, DivergenceHalvesOnceThenStops) {
  const Fixture f = harmonic_fixture(5.0, 13);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.learning_rate = 1e4;
  const TrainResult result = train(f.model, f.dataset, cfg, SmcConfig{}, f.scaling, f.params);
  // Epoch 1 diverges, the epoch-0 parameters are re-evaluated at epoch 2 with
  // half the rate, and the next divergence ends the run.
  EXPECT_TRUE(result.stopped_early);
  EXPECT_EQ(result.diverged_epochs, (std::vector<std::size_t>{1, 3}));
  ASSERT_EQ(result.history.size(), 2u);
  EXPECT_EQ(result.history[1].epoch, 2u);
  EXPECT_EQ(result.history[1].loss.total, result.history[0].loss.total);
  EXPECT_EQ(flatten_parameters(result.best.layers), flatten_parameters(f.params.layers));
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.beta1 = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.learning_rate = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_EQ(parse_residual_units("rate"), ResidualUnits::kRate);
  EXPECT_STREQ(residual_units_name(ResidualUnits::kStep), "step");
  EXPECT_THROW(parse_residual_units("seconds"), Error);
}

TEST(Dataset, SinglePairLengthAndGrid) {
  const Fixture f = harmonic_fixture(1.0, 14);
  EXPECT_EQ(f.dataset.samples.size(), 1u);
  EXPECT_EQ(f.dataset.samples[0].measured.size(), 101u);

  const auto [x0s, xhat0s] = sample_initial_pairs(2, {-1.0, 1.0}, {-2.0, 2.0}, 5, 5, 7);
  ASSERT_EQ(x0s.size(), 25u);
  ASSERT_EQ(xhat0s.size(), 25u);
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_LE(x0s[i].cwiseAbs().maxCoeff(), 1.0);
    EXPECT_LE(xhat0s[i].cwiseAbs().maxCoeff(), 2.0);
    EXPECT_EQ(x0s[i], x0s[(i / 5) * 5]);   // each truth meets every guess
    EXPECT_EQ(xhat0s[i], xhat0s[i % 5]);
  }
  const auto again = sample_initial_pairs(2, {-1.0, 1.0}, {-2.0, 2.0}, 5, 5, 7);
  EXPECT_EQ(again.first, x0s);
  EXPECT_NE(sample_initial_pairs(2, {-1.0, 1.0}, {-2.0, 2.0}, 5, 5, 8).first, x0s);

  const SystemModel duffing = builtin_model("reverse_duffing");
  const TrainingDataset grid = build_dataset(duffing, x0s, xhat0s, 0.01, 1.0, NoiseSpec{});
  EXPECT_EQ(grid.samples.size(), 25u);
  EXPECT_THROW(build_dataset(duffing, x0s, {}, 0.01, 1.0, NoiseSpec{}), Error);
}

}  // namespace
}  // namespace softsensor
