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

#include <cstdlib>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"

namespace softsensor {
namespace {

ErrorCode code_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kIo;
}

TEST(KeyValueConfig, ParsesCommentsAndWhitespace) {
  const auto cfg = KeyValueConfig::parse(
      "# header\n  model = harmonic  # trailing\n\nx0 = 1, 2 ,3\nflag = yes\n", "t");
  EXPECT_EQ(cfg.require("model"), "harmonic");
  EXPECT_EQ(cfg.get_doubles("x0"), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_TRUE(cfg.get_bool("flag", false));
  EXPECT_FALSE(cfg.has("missing"));
  EXPECT_EQ(cfg.get_int("missing", 4), 4);
}

TEST(KeyValueConfig, ReportsLineOfMalformedEntry) {
  std::string message;
  EXPECT_EQ(code_of([] { KeyValueConfig::parse("a = 1\nnot an entry\n", "cfg.txt"); },
                    &message),
            ErrorCode::kConfig);
  EXPECT_NE(message.find("cfg.txt:2"), std::string::npos);
}

TEST(KeyValueConfig, MissingKeyIsNamed) {
  const auto cfg = KeyValueConfig::parse("a = 1\n", "t");
  std::string message;
  EXPECT_EQ(code_of([&] { cfg.require("model"); }, &message), ErrorCode::kConfig);
  EXPECT_NE(message.find("'model'"), std::string::npos);
}

TEST(KeyValueConfig, BadValuesNameKeyAndOrigin) {
  auto cfg = KeyValueConfig::parse("dt = fast\nn = 2.5\nb = maybe\nv = 1, x\n", "f.cfg");
  std::string message;
  EXPECT_EQ(code_of([&] { cfg.require_double("dt"); }, &message), ErrorCode::kConfig);
  EXPECT_NE(message.find("dt"), std::string::npos);
  EXPECT_NE(message.find("f.cfg"), std::string::npos);
  EXPECT_EQ(code_of([&] { cfg.get_int("n", 0); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([&] { cfg.get_bool("b", false); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([&] { cfg.get_doubles("v"); }), ErrorCode::kConfig);
  cfg.set("v", "1, 2");
  EXPECT_EQ(code_of([&] { cfg.require_vector("v", 3); }), ErrorCode::kConfig);
}

TEST(KeyValueConfig, MergeOverridesAndDumpRoundTrips) {
  auto base = KeyValueConfig::parse("a = 1\nb = 2\n", "base");
  base.merge(KeyValueConfig::parse("b = 3\nc = 4\n", "over"));
  EXPECT_EQ(base.require("b"), "3");
  const auto again = KeyValueConfig::parse(base.dump(), "dump");
  EXPECT_EQ(again.entries(), base.entries());
}

TEST(Presets, AllResolve) {
  const auto names = preset_names();
  for (const char* expected : {"ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), expected), names.end()) << expected;
  }
  for (const auto& name : names) {
    const ExperimentConfig cfg = resolve_experiment(preset(name));
    const SystemModel model = cfg.build_model();
    EXPECT_FALSE(cfg.x0s.empty()) << name;
    EXPECT_EQ(cfg.x0s.size(), cfg.xhat0s.size()) << name;
    EXPECT_GT(cfg.dt, 0.0) << name;
    EXPECT_LT(cfg.burn_in, cfg.test_horizon) << name;
    EXPECT_EQ(cfg.smc.k0, 5.0) << name;
    EXPECT_EQ(cfg.smc.alpha, 0.01) << name;
    EXPECT_EQ(cfg.train.lambda, 0.001) << name;
    const auto dims = cfg.network_dims(model);
    EXPECT_EQ(dims.front(), 1 + model.p + model.m) << name;
    EXPECT_EQ(dims.back(), model.n * model.m) << name;
  }
  EXPECT_EQ(code_of([] { preset("ex99"); }), ErrorCode::kConfig);
}

TEST(Presets, PaperSettings) {
  const ExperimentConfig ex1 = resolve_experiment(preset("ex1"));
  EXPECT_EQ(ex1.model_name, "rossler");
  EXPECT_EQ(ex1.dt, 0.001);
  EXPECT_EQ(ex1.horizon, 10.0);
  EXPECT_EQ(ex1.noise.stddev_scale, 0.01);
  EXPECT_EQ(ex1.test_x0s[0], (Vector{{-4.0, 5.0, 4.0}}));
  EXPECT_EQ(ex1.test_horizon, 20.0);
  EXPECT_EQ(ex1.hidden, (std::vector<int>{64, 64}));

  const ExperimentConfig ex7 = resolve_experiment(preset("ex7"));
  EXPECT_EQ(ex7.x0s.size(), 25u);
  for (std::size_t i = 0; i < ex7.x0s.size(); ++i) {
    EXPECT_LE(ex7.x0s[i].cwiseAbs().maxCoeff(), 1.0);
    EXPECT_LE(ex7.xhat0s[i].cwiseAbs().maxCoeff(), 2.0);
  }
  const ExperimentConfig noisy = resolve_experiment(preset("ex7_noisy"));
  EXPECT_EQ(noisy.noise.stddev_scale, 0.01);
  EXPECT_EQ(noisy.noise.target, NoiseTarget::kMeasurement);

  const ExperimentConfig square = resolve_experiment(preset("ex6_square"));
  EXPECT_EQ(square.control, ControlKind::kSquareWave);
  EXPECT_TRUE(square.project_nonnegative);
}

TEST(Resolve, RejectsInconsistentSettings) {
  auto cfg = preset("ex2");
  cfg.set("x0", "1, 2");
  EXPECT_EQ(code_of([&] { resolve_experiment(cfg); }), ErrorCode::kConfig);
  cfg = preset("ex2");
  cfg.set("test.burn_in", "50");
  EXPECT_EQ(code_of([&] { resolve_experiment(cfg); }), ErrorCode::kConfig);
  cfg = preset("ex2");
  cfg.set("train.epochs", "0");
  EXPECT_EQ(code_of([&] { resolve_experiment(cfg); }), ErrorCode::kConfig);
  cfg = preset("ex2");
  cfg.set("model", "pendulum");
  EXPECT_EQ(code_of([&] { resolve_experiment(cfg).build_model(); }),
            ErrorCode::kUnknownModel);
  cfg = preset("ex2");
  cfg.set("loss.residual", "hourly");
  EXPECT_EQ(code_of([&] { resolve_experiment(cfg); }), ErrorCode::kConfig);
  auto bare = KeyValueConfig::parse("dt = 0.01\n", "t");
  std::string message;
  EXPECT_EQ(code_of([&] { resolve_experiment(bare); }, &message), ErrorCode::kConfig);
  EXPECT_NE(message.find("model"), std::string::npos);
}

TEST(Resolve, TestDefaultsToTrainingPair) {
  const ExperimentConfig cfg = resolve_experiment(preset("ex3"));
  EXPECT_EQ(cfg.test_x0s, cfg.x0s);
  EXPECT_EQ(cfg.test_xhat0s, cfg.xhat0s);
  EXPECT_EQ(cfg.test_horizon, cfg.horizon);
}

TEST(OutputDir, FlagThenEnvironmentThenKey) {
  auto cfg = preset("ex2");
  cfg.set("output_dir", "from_key");
  ::unsetenv("SOFTSENSOR_OUT");
  EXPECT_EQ(resolve_output_dir(cfg, std::nullopt), "from_key");
  ::setenv("SOFTSENSOR_OUT", "from_env", 1);
  EXPECT_EQ(resolve_output_dir(cfg, std::nullopt), "from_env");
  EXPECT_EQ(resolve_output_dir(cfg, std::string("from_flag")), "from_flag");
  ::unsetenv("SOFTSENSOR_OUT");
}

}  // namespace
}  // namespace softsensor
