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

#include "core/config.hpp"

#include <fstream>
#include <sstream>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace softsensor {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  }
  return true;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, const std::string& source) {
  KeyValueConfig config;
  std::istringstream stream{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(stream, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number);
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kConfig, where + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    if (!valid_key(key)) fail(ErrorCode::kConfig, where + ": invalid key '" + key + "'");
    config.entries_[key] = {trim(body.substr(eq + 1)), where};
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

void KeyValueConfig::merge(const KeyValueConfig& other) {
  for (const auto& [key, entry] : other.entries_) entries_[key] = entry;
}

void KeyValueConfig::set(const std::string& key, const std::string& value,
                         const std::string& origin) {
  if (!valid_key(key)) fail(ErrorCode::kConfig, "invalid key '" + key + "'");
  entries_[key] = {trim(value), origin};
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

const std::string& KeyValueConfig::require(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) fail(ErrorCode::kConfig, "missing required key '" + key + "'");
  return it->second.value;
}

void KeyValueConfig::bad_value(const std::string& key, const std::string& why) const {
  const auto it = entries_.find(key);
  const std::string where = it == entries_.end() ? "" : " (" + it->second.origin + ")";
  fail(ErrorCode::kConfig, "key '" + key + "'" + where + ": " + why);
}

double KeyValueConfig::require_double(const std::string& key) const {
  const std::string& text = require(key);
  try {
    return parse_double(text);
  } catch (const Error&) {
    bad_value(key, "expected a number, got '" + text + "'");
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? require_double(key) : fallback;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = require(key);
  try {
    std::size_t used = 0;
    const long long value = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    bad_value(key, "expected an integer, got '" + text + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& text = require(key);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_value(key, "expected true/false, got '" + text + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  const std::string& text = require(key);
  std::vector<double> values;
  std::istringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    try {
      values.push_back(parse_double(field));
    } catch (const Error&) {
      bad_value(key, "expected comma-separated numbers, got '" + text + "'");
    }
  }
  if (values.empty()) bad_value(key, "empty list");
  return values;
}

Vector KeyValueConfig::require_vector(const std::string& key, std::optional<int> size) const {
  const auto values = get_doubles(key);
  if (size && static_cast<int>(values.size()) != *size) {
    bad_value(key, "expected " + std::to_string(*size) + " values, got " +
                       std::to_string(values.size()));
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string KeyValueConfig::dump() const {
  std::string out;
  for (const auto& [key, entry] : entries_) out += key + " = " + entry.value + "\n";
  return out;
}

std::map<std::string, std::string> KeyValueConfig::entries() const {
  std::map<std::string, std::string> out;
  for (const auto& [key, entry] : entries_) out[key] = entry.value;
  return out;
}

namespace {

constexpr const char* kCommon = R"(
smc.k0 = 5
smc.alpha = 0.01
smc.polarity = reaching
net.hidden = 64, 64
train.lambda = 0.001
train.lr = 0.001
train.beta1 = 0.9
train.beta2 = 0.999
train.eps = 1e-8
train.truncation = 0
train.seed = 1
loss.residual = step
metrics.threshold = 0.01
metrics.dwell = 1
diagnose.horizon = 2
output_dir = out
)";

struct PresetDef {
  const char* name;
  const char* body;
};

// Settings the examples leave open (dt outside ex1, test conditions, epoch
// counts, tank constants) are chosen here and documented in the README.
const PresetDef kPresets[] = {
    {"ex1", R"(
model = rossler
x0 = 1, 1, 1
xhat0 = 0, 1, 2
dt = 0.001
horizon = 10
noise.target = measurement
noise.stddev = 0.01
noise.seed = 11
train.epochs = 300
test.x0 = -4, 5, 4
test.xhat0 = 0, 1, 2
test.horizon = 20
test.burn_in = 10
)"},
    {"ex2", R"(
model = harmonic
x0 = 2, -1, 3
xhat0 = 1, 1, 2
dt = 0.01
horizon = 10
loss.residual = rate
train.epochs = 3000
test.burn_in = 5
)"},
    {"ex3", R"(
model = autonomous
x0 = 1, 1
xhat0 = 1, 2
dt = 0.01
horizon = 10
loss.residual = rate
train.epochs = 3000
test.burn_in = 5
)"},
    {"ex3_sum", R"(
model = autonomous_sum
x0 = 1, 1
xhat0 = 1, 2
dt = 0.01
horizon = 10
train.epochs = 300
test.burn_in = 5
)"},
    {"ex4", R"(
model = academic_sum
x0 = 1, 0.5
xhat0 = 0, 0
dt = 0.01
horizon = 10
train.epochs = 300
test.burn_in = 5
)"},
    {"ex4_x1", R"(
model = academic
x0 = 1, 0.5
xhat0 = 0, 0
dt = 0.01
horizon = 10
train.epochs = 300
test.burn_in = 5
)"},
    {"ex5", R"(
model = academic_mod
x0 = 1, 0.5
xhat0 = 0, 0
dt = 0.01
horizon = 10
train.epochs = 300
test.burn_in = 5
)"},
    {"ex6", R"(
model = three_tank
x0 = 0.6, 0.4, 0.2
xhat0 = 0.4, 0.4, 0.4
dt = 0.01
horizon = 20
control.type = none
train.epochs = 300
test.burn_in = 10
)"},
    {"ex6_square", R"(
model = three_tank
x0 = 0.6, 0.4, 0.2
xhat0 = 0.4, 0.4, 0.4
dt = 0.01
horizon = 20
control.type = square
control.u_min = 0, 0
control.u_max = 0.001, 0.001
control.frequency = 0.1
projection = true
train.epochs = 300
test.burn_in = 10
)"},
    {"ex7", R"(
model = reverse_duffing
dt = 0.01
horizon = 10
train.sample.x0_range = -1, 1
train.sample.xhat0_range = -2, 2
train.sample.count_x0 = 5
train.sample.count_xhat0 = 5
train.sample.seed = 7
train.epochs = 300
test.sample.x0_range = -1, 1
test.sample.xhat0_range = -2, 2
test.sample.count_x0 = 5
test.sample.count_xhat0 = 1
test.sample.seed = 1007
test.horizon = 20
test.burn_in = 10
)"},
    {"ex7_noisy", R"(
model = reverse_duffing
dt = 0.01
horizon = 10
noise.target = measurement
noise.stddev = 0.01
noise.seed = 17
train.sample.x0_range = -1, 1
train.sample.xhat0_range = -2, 2
train.sample.count_x0 = 5
train.sample.count_xhat0 = 5
train.sample.seed = 7
train.epochs = 300
test.sample.x0_range = -1, 1
test.sample.xhat0_range = -2, 2
test.sample.count_x0 = 5
test.sample.count_xhat0 = 1
test.sample.seed = 1007
test.horizon = 20
test.burn_in = 10
)"},
    {"linear_pair", R"(
model = linear_chain
x0 = 1, 0.5
xhat0 = 0, 0
dt = 0.01
horizon = 10
train.epochs = 50
diagnose.horizon = 1
)"},
};

std::pair<double, double> require_range(const KeyValueConfig& config,
                                        const std::string& key) {
  const Vector range = config.require_vector(key, 2);
  if (!(range[0] <= range[1])) fail(ErrorCode::kConfig, "key '" + key + "': lo > hi");
  return {range[0], range[1]};
}

std::optional<SamplingSpec> read_sampling(const KeyValueConfig& config,
                                          const std::string& prefix) {
  if (!config.has(prefix + "x0_range")) return std::nullopt;
  SamplingSpec spec;
  spec.x0_range = require_range(config, prefix + "x0_range");
  spec.xhat0_range = require_range(config, prefix + "xhat0_range");
  spec.count_x0 = static_cast<int>(config.get_int(prefix + "count_x0", 1));
  spec.count_xhat0 = static_cast<int>(config.get_int(prefix + "count_xhat0", 1));
  spec.seed = static_cast<std::uint64_t>(config.get_int(prefix + "seed", 0));
  if (spec.count_x0 < 1 || spec.count_xhat0 < 1) {
    fail(ErrorCode::kConfig, prefix + "count_* must be >= 1");
  }
  return spec;
}

NoiseSpec read_noise(const KeyValueConfig& config, const std::string& prefix,
                     const NoiseSpec& fallback) {
  NoiseSpec noise = fallback;
  if (auto target = config.get(prefix + "target")) noise.target = parse_noise_target(*target);
  noise.stddev_scale = config.get_double(prefix + "stddev", fallback.stddev_scale);
  noise.seed = static_cast<std::uint64_t>(
      config.get_int(prefix + "seed", static_cast<long long>(fallback.seed)));
  if (noise.stddev_scale < 0.0) fail(ErrorCode::kConfig, prefix + "stddev must be >= 0");
  return noise;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& def : kPresets) names.emplace_back(def.name);
  return names;
}

KeyValueConfig preset(std::string_view name) {
  for (const auto& def : kPresets) {
    if (name == def.name) {
      KeyValueConfig config = KeyValueConfig::parse(kCommon, "preset:common");
      config.merge(KeyValueConfig::parse(def.body, "preset:" + std::string(name)));
      return config;
    }
  }
  fail(ErrorCode::kConfig, "unknown preset '" + std::string(name) + "'");
}

SystemModel ExperimentConfig::build_model() const {
  SystemModel model = builtin_model(model_name, tank);
  if (control == ControlKind::kSquareWave) {
    if (!model.input_matrix.any()) fail(ErrorCode::kConfig, model_name + " has no control input");
    if (u_min.size() != model.p || u_max.size() != model.p) {
      fail(ErrorCode::kConfig, "control.u_min/u_max must have p entries");
    }
    model.control = square_wave_control(u_min, u_max, control_frequency);
  }
  model.nonnegative = project_nonnegative;
  return model;
}

std::vector<int> ExperimentConfig::network_dims(const SystemModel& model) const {
  std::vector<int> dims{1 + model.p + model.m};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(model.n * model.m);
  return dims;
}

ExperimentConfig resolve_experiment(const KeyValueConfig& config) {
  ExperimentConfig cfg;
  cfg.model_name = config.require("model");

  if (config.has("tank.area")) cfg.tank.tank_area = config.require_double("tank.area");
  if (config.has("tank.pipe_area")) cfg.tank.pipe_area = config.require_double("tank.pipe_area");
  if (config.has("tank.gravity")) cfg.tank.gravity = config.require_double("tank.gravity");
  if (config.has("tank.flow_coeff")) {
    const Vector coeff = config.require_vector("tank.flow_coeff", 3);
    for (int i = 0; i < 3; ++i) cfg.tank.flow_coeff[i] = coeff[i];
  }
  const std::string control = config.get("control.type").value_or("none");
  if (control == "square") {
    cfg.control = ControlKind::kSquareWave;
    cfg.u_min = config.require_vector("control.u_min");
    cfg.u_max = config.require_vector("control.u_max");
    cfg.control_frequency = config.require_double("control.frequency");
    if (!(cfg.control_frequency > 0.0)) {
      fail(ErrorCode::kConfig, "control.frequency must be positive");
    }
  } else if (control != "none") {
    fail(ErrorCode::kConfig, "control.type must be none or square");
  }
  cfg.project_nonnegative = config.get_bool("projection", false);

  const SystemModel model = cfg.build_model();
  const int n = model.n;

  cfg.dt = config.require_double("dt");
  cfg.horizon = config.require_double("horizon");
  try {
    step_count(cfg.dt, cfg.horizon);
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, std::string("dt/horizon: ") + e.what());
  }
  cfg.noise = read_noise(config, "noise.", NoiseSpec{});

  cfg.train_sampling = read_sampling(config, "train.sample.");
  if (cfg.train_sampling) {
    const auto& s = *cfg.train_sampling;
    std::tie(cfg.x0s, cfg.xhat0s) = sample_initial_pairs(
        n, s.x0_range, s.xhat0_range, s.count_x0, s.count_xhat0, s.seed);
  } else {
    cfg.x0s = {config.require_vector("x0", n)};
    cfg.xhat0s = {config.require_vector("xhat0", n)};
  }

  cfg.smc.k0 = config.get_double("smc.k0", cfg.smc.k0);
  cfg.smc.alpha = config.get_double("smc.alpha", cfg.smc.alpha);
  if (auto polarity = config.get("smc.polarity")) cfg.smc.polarity = parse_smc_polarity(*polarity);
  try {
    cfg.smc.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, e.what());
  }

  if (config.has("net.hidden")) {
    cfg.hidden.clear();
    for (double width : config.get_doubles("net.hidden")) {
      if (width < 1.0 || width != static_cast<int>(width)) {
        fail(ErrorCode::kConfig, "net.hidden entries must be positive integers");
      }
      cfg.hidden.push_back(static_cast<int>(width));
    }
  }

  cfg.train.epochs = static_cast<int>(config.get_int("train.epochs", cfg.train.epochs));
  cfg.train.learning_rate = config.get_double("train.lr", cfg.train.learning_rate);
  cfg.train.beta1 = config.get_double("train.beta1", cfg.train.beta1);
  cfg.train.beta2 = config.get_double("train.beta2", cfg.train.beta2);
  cfg.train.epsilon = config.get_double("train.eps", cfg.train.epsilon);
  cfg.train.lambda = config.get_double("train.lambda", cfg.train.lambda);
  const long long truncation = config.get_int("train.truncation", 0);
  if (truncation < 0) fail(ErrorCode::kConfig, "train.truncation must be >= 0");
  cfg.train.bptt_truncation = static_cast<std::size_t>(truncation);
  if (auto units = config.get("loss.residual")) {
    cfg.train.residual_units = parse_residual_units(*units);
  }
  cfg.train.seed = static_cast<std::uint64_t>(config.get_int("train.seed", 0));
  cfg.train.validate();

  const auto test_sampling = read_sampling(config, "test.sample.");
  if (test_sampling) {
    std::tie(cfg.test_x0s, cfg.test_xhat0s) = sample_initial_pairs(
        n, test_sampling->x0_range, test_sampling->xhat0_range, test_sampling->count_x0,
        test_sampling->count_xhat0, test_sampling->seed);
  } else {
    cfg.test_x0s = {config.has("test.x0") ? config.require_vector("test.x0", n) : cfg.x0s[0]};
    cfg.test_xhat0s = {config.has("test.xhat0") ? config.require_vector("test.xhat0", n)
                                                : cfg.xhat0s[0]};
  }
  cfg.test_horizon = config.get_double("test.horizon", cfg.horizon);
  try {
    step_count(cfg.dt, cfg.test_horizon);
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, std::string("dt/test.horizon: ") + e.what());
  }
  cfg.burn_in = config.get_double("test.burn_in", 0.0);
  if (!(cfg.burn_in >= 0.0 && cfg.burn_in < cfg.test_horizon)) {
    fail(ErrorCode::kConfig, "test.burn_in must lie in [0, test.horizon)");
  }
  NoiseSpec test_default = cfg.noise;
  test_default.seed = cfg.noise.seed + 1000;
  cfg.test_noise = read_noise(config, "test.noise.", test_default);
  cfg.convergence_threshold = config.get_double("metrics.threshold", 1e-2);
  cfg.convergence_dwell = config.get_double("metrics.dwell", 1.0);
  if (!(cfg.convergence_threshold > 0.0) || !(cfg.convergence_dwell >= 0.0)) {
    fail(ErrorCode::kConfig, "metrics.threshold must be > 0 and metrics.dwell >= 0");
  }

  const long long diag = config.get_int("diagnose.horizon", 2);
  if (diag < 0) fail(ErrorCode::kConfig, "diagnose.horizon must be >= 0");
  cfg.diagnose_horizon = static_cast<std::size_t>(diag);
  if (config.has("diagnose.point")) cfg.diagnose_point = config.require_vector("diagnose.point", n);

  cfg.output_dir = config.get("output_dir").value_or("out");
  return cfg;
}

}  // namespace softsensor
