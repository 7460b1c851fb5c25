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

// softsensor command-line front end. Thin layer over the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "softsensor/softsensor.h"

namespace {

constexpr int kExitConfig = 2;

struct ConfigDeleter {
  void operator()(ss_config* c) const { ss_config_free(c); }
};
using ConfigPtr = std::unique_ptr<ss_config, ConfigDeleter>;

struct CommonOptions {
  std::string preset;
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<unsigned long long> seed;
  std::optional<int> epochs;
  std::string out;
  bool quiet = false;
};

class Failure {
 public:
  explicit Failure(ss_status status) : status_(status) {}
  ss_status status() const { return status_; }

 private:
  ss_status status_;
};

void check(ss_status status) {
  if (status != SS_OK) throw Failure(status);
}

std::string buffer_call(const std::function<ss_status(char*, size_t, size_t*)>& fn) {
  std::string text(4096, '\0');
  size_t needed = 0;
  check(fn(text.data(), text.size(), &needed));
  if (needed > text.size()) {
    text.assign(needed, '\0');
    check(fn(text.data(), text.size(), &needed));
  }
  text.resize(needed ? needed - 1 : 0);
  return text;
}

ConfigPtr build_config(const CommonOptions& opts) {
  ss_config* raw = nullptr;
  if (!opts.preset.empty()) {
    check(ss_config_from_preset(opts.preset.c_str(), &raw));
  } else if (!opts.config_file.empty()) {
    check(ss_config_from_file(opts.config_file.c_str(), &raw));
  } else {
    std::fprintf(stderr, "error: one of --preset or --config is required\n");
    throw Failure(SS_ERR_CONFIG);
  }
  ConfigPtr config(raw);
  if (!opts.preset.empty() && !opts.config_file.empty()) {
    check(ss_config_merge_file(config.get(), opts.config_file.c_str()));
  }
  for (const auto& assignment : opts.sets) {
    check(ss_config_set_assignment(config.get(), assignment.c_str()));
  }
  if (opts.seed) {
    const std::string seed = std::to_string(*opts.seed);
    check(ss_config_set(config.get(), "train.seed", seed.c_str()));
    check(ss_config_set(config.get(), "noise.seed", seed.c_str()));
  }
  if (opts.epochs) {
    check(ss_config_set(config.get(), "train.epochs", std::to_string(*opts.epochs).c_str()));
  }
  check(ss_config_validate(config.get()));
  return config;
}

std::string output_dir(const ss_config* config, const CommonOptions& opts) {
  return buffer_call([&](char* buf, size_t cap, size_t* needed) {
    return ss_config_output_dir(config, opts.out.empty() ? nullptr : opts.out.c_str(), buf,
                                cap, needed);
  });
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(field, &used));
      if (field.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --point expects comma-separated numbers, got '%s'\n",
                   text.c_str());
      throw Failure(SS_ERR_CONFIG);
    }
  }
  return values;
}

void print_metrics(const ss_metrics_summary& m) {
  std::printf("%-14s %-14s %-14s %-14s\n", "MSE", "RMSE", "MAE", "SMAPE%");
  std::printf("%-14.6e %-14.6e %-14.6e %-14.6f\n", m.mse, m.rmse, m.mae, m.smape_percent);
  for (int i = 0; i < m.n && i < SS_MAX_STATES; ++i) {
    std::printf("  MAE x%-3d %.6e\n", i + 1, m.per_state_mae[i]);
  }
  if (m.converged) {
    std::printf("convergence time: %.4f s\n", m.convergence_time_s);
  } else {
    std::printf("convergence time: not reached\n");
  }
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool training) {
  cmd->add_option("--preset", opts.preset, "Built-in experiment (ex1 .. ex7, variants)");
  cmd->add_option("--config", opts.config_file, "key = value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", opts.sets, "Override a config key (key=value), repeatable");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--seed", opts.seed, "Seed for network init and training noise");
  if (training) {
    cmd->add_option("--epochs", opts.epochs, "Training epochs (>= 1)")
        ->check(CLI::PositiveNumber);
  }
}

void on_epoch(const ss_epoch_info* info, void* user) {
  const bool quiet = *static_cast<bool*>(user);
  if (quiet) return;
  if (info->epoch % 10 == 0 || info->epoch == 1) {
    std::fprintf(stderr, "epoch %5zu  total %.6e  mse_d %.3e  mse_y %.3e  reg %.3e  best %.6e\n",
                 info->epoch, info->total, info->mse_d, info->mse_y, info->reg,
                 info->best_total);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural-gain adaptive sliding-mode observers"};
  app.set_version_flag("--version", std::string("softsensor ") + ss_version());
  app.require_subcommand(1);
  app.add_flag_callback("--list-presets", [] {
    for (size_t i = 0; i < ss_preset_count(); ++i) std::printf("%s\n", ss_preset_name(i));
    throw CLI::Success();
  }, "Print preset names and exit");

  CommonOptions opts;
  std::string checkpoint;
  std::string point;
  std::string truth, estimate;
  double burn_in = 0.0, threshold = 1e-2, dwell = 1.0;

  auto* simulate = app.add_subcommand("simulate", "Simulate the configured system to CSV");
  add_common(simulate, opts, false);

  auto* train = app.add_subcommand("train", "Train the gain network");
  add_common(train, opts, true);
  train->add_flag("--quiet", opts.quiet, "No per-epoch progress");

  auto* test = app.add_subcommand("test", "Run the trained observer on test trajectories");
  add_common(test, opts, false);
  test->add_option("--checkpoint", checkpoint,
                   "Trained network (default: <out>/checkpoint.json)");

  auto* diagnose = app.add_subcommand("diagnose", "Observability rank and Gramian bounds");
  add_common(diagnose, opts, false);
  diagnose->add_option("--point", point, "Evaluation point, comma-separated");

  auto* metrics = app.add_subcommand("metrics", "Score an estimate CSV against a truth CSV");
  metrics->add_option("--truth", truth, "Truth trajectory CSV")->required();
  metrics->add_option("--estimate", estimate, "Estimate trajectory CSV")->required();
  metrics->add_option("--burn-in", burn_in, "Seconds excluded from the aggregates")
      ->check(CLI::NonNegativeNumber);
  metrics->add_option("--threshold", threshold, "Convergence RMSE threshold")
      ->check(CLI::PositiveNumber);
  metrics->add_option("--dwell", dwell, "Convergence dwell time in seconds")
      ->check(CLI::NonNegativeNumber);
  metrics->add_option("--out", opts.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (metrics->parsed()) {
      const std::string out = opts.out.empty()
                                  ? (std::getenv("SOFTSENSOR_OUT") ? std::getenv("SOFTSENSOR_OUT")
                                                                   : std::string("out"))
                                  : opts.out;
      ss_metrics_summary summary{};
      check(ss_run_metrics(truth.c_str(), estimate.c_str(), burn_in, threshold, dwell,
                           out.c_str(), &summary));
      print_metrics(summary);
      return 0;
    }

    const ConfigPtr config = build_config(opts);
    const std::string out = output_dir(config.get(), opts);

    if (simulate->parsed()) {
      ss_simulate_summary summary{};
      check(ss_run_simulate(config.get(), out.c_str(), &summary));
      std::printf("wrote %zu trajectory file(s) of %zu samples to %s\n", summary.trajectories,
                  summary.samples, out.c_str());
    } else if (train->parsed()) {
      ss_train_summary summary{};
      check(ss_run_train(config.get(), out.c_str(), on_epoch, &opts.quiet, &summary));
      std::printf("best epoch %zu of %zu: total %.6e (mse_d %.3e, mse_y %.3e, reg %.3e)\n",
                  summary.best_epoch, summary.epochs_run, summary.best_total,
                  summary.best_mse_d, summary.best_mse_y, summary.best_reg);
      if (summary.diverged_epochs) {
        std::printf("diverged epochs: %zu%s\n", summary.diverged_epochs,
                    summary.stopped_early ? " (stopped early)" : "");
      }
      std::printf("checkpoint: %s/checkpoint.json\n", out.c_str());
    } else if (test->parsed()) {
      const std::string ckpt = checkpoint.empty() ? out + "/checkpoint.json" : checkpoint;
      ss_test_summary summary{};
      check(ss_run_test(config.get(), ckpt.c_str(), out.c_str(), &summary));
      std::printf("test trajectories: %zu (set mean below)\n", summary.trajectories);
      print_metrics(summary.mean);
      std::printf("min state estimate: %.6e\n", summary.min_state_estimate);
    } else if (diagnose->parsed()) {
      std::vector<double> x;
      if (!point.empty()) x = parse_list(point);
      ss_diagnose_summary summary{};
      const std::string table = buffer_call([&](char* buf, size_t cap, size_t* needed) {
        return ss_run_diagnose(config.get(), x.empty() ? nullptr : x.data(), x.size(),
                               out.c_str(), &summary, buf, cap, needed);
      });
      std::fputs(table.c_str(), stdout);
    }
    return 0;
  } catch (const Failure& f) {
    const char* message = ss_last_error();
    if (message && *message) {
      std::fprintf(stderr, "error: %s\n", message);
    }
    return ss_exit_code(f.status());
  }
}
