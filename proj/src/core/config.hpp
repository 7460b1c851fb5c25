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

#ifndef SOFTSENSOR_CORE_CONFIG_HPP
#define SOFTSENSOR_CORE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/observer.hpp"
#include "core/systems.hpp"
#include "core/training.hpp"

namespace softsensor {

/// Flat `key = value` configuration with dotted section names. `#` starts a
/// comment. Later assignments override earlier ones; every entry remembers
/// where it came from for error messages.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text, const std::string& source);
  static KeyValueConfig load(const std::string& path);

  void merge(const KeyValueConfig& other);
  void set(const std::string& key, const std::string& value,
           const std::string& origin = "override");

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  const std::string& require(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  Vector require_vector(const std::string& key, std::optional<int> size = {}) const;

  /// Canonical `key = value` listing, sorted by key.
  std::string dump() const;
  std::map<std::string, std::string> entries() const;

 private:
  struct Entry {
    std::string value;
    std::string origin;
  };
  [[noreturn]] void bad_value(const std::string& key, const std::string& why) const;

  std::map<std::string, Entry> entries_;
};

std::vector<std::string> preset_names();
/// Built-in experiment definitions ex1..ex7 and their variants.
KeyValueConfig preset(std::string_view name);

enum class ControlKind { kNone, kSquareWave };

struct SamplingSpec {
  std::pair<double, double> x0_range{0.0, 0.0};
  std::pair<double, double> xhat0_range{0.0, 0.0};
  int count_x0 = 0;
  int count_xhat0 = 0;
  std::uint64_t seed = 0;
};

/// Fully resolved experiment settings.
struct ExperimentConfig {
  std::string model_name;
  ThreeTankParams tank;
  ControlKind control = ControlKind::kNone;
  Vector u_min, u_max;
  double control_frequency = 0.0;
  bool project_nonnegative = false;

  std::vector<Vector> x0s;
  std::vector<Vector> xhat0s;
  std::optional<SamplingSpec> train_sampling;
  double dt = 0.0;
  double horizon = 0.0;
  NoiseSpec noise;

  SmcConfig smc;
  std::vector<int> hidden{64, 64};
  TrainConfig train;

  std::vector<Vector> test_x0s;
  std::vector<Vector> test_xhat0s;
  double test_horizon = 0.0;
  double burn_in = 0.0;
  NoiseSpec test_noise;
  double convergence_threshold = 1e-2;
  double convergence_dwell = 1.0;

  std::size_t diagnose_horizon = 2;
  std::optional<Vector> diagnose_point;

  std::string output_dir = "out";

  SystemModel build_model() const;
  std::vector<int> network_dims(const SystemModel& model) const;
};

ExperimentConfig resolve_experiment(const KeyValueConfig& config);

}  // namespace softsensor

#endif  // SOFTSENSOR_CORE_CONFIG_HPP
