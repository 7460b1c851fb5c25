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

#include "core/systems.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "core/error.hpp"

namespace softsensor {

void SystemModel::validate() const {
  if (n < 1 || m < 1 || p < 1) {
    fail(ErrorCode::kInvalidArgument,
         "model '" + name + "' needs n, m, p >= 1");
  }
  if (!drift || !output_map) {
    fail(ErrorCode::kInvalidArgument, "model '" + name + "' lacks drift or output map");
  }
  if (input_matrix.rows() != n || input_matrix.cols() != p) {
    fail(ErrorCode::kDimensionMismatch,
         "model '" + name + "': input matrix must be n x p");
  }
  if (output_structure.rows() != m || output_structure.cols() != n) {
    fail(ErrorCode::kDimensionMismatch,
         "model '" + name + "': output structure must be m x n");
  }
}

Vector SystemModel::input(double t) const {
  if (!control) return Vector::Zero(p);
  Vector u = control(t);
  if (u.size() != p) {
    fail(ErrorCode::kDimensionMismatch, "control signal returned wrong size");
  }
  return u;
}

NoiseTarget parse_noise_target(std::string_view text) {
  if (text == "none") return NoiseTarget::kNone;
  if (text == "measurement") return NoiseTarget::kMeasurement;
  if (text == "process") return NoiseTarget::kProcess;
  fail(ErrorCode::kConfig, "unknown noise target '" + std::string(text) + "'");
}

const char* to_string(NoiseTarget target) {
  switch (target) {
    case NoiseTarget::kNone: return "none";
    case NoiseTarget::kMeasurement: return "measurement";
    case NoiseTarget::kProcess: return "process";
  }
  return "none";
}

double Trajectory::dt() const {
  if (times.size() < 2) return 0.0;
  return (times.back() - times.front()) / static_cast<double>(times.size() - 1);
}

double Trajectory::horizon() const {
  return times.empty() ? 0.0 : times.back() - times.front();
}

void Trajectory::validate() const {
  const std::size_t len = times.size();
  if (len == 0) fail(ErrorCode::kInvalidArgument, "empty trajectory");
  if (states.size() != len || outputs.size() != len || inputs.size() != len) {
    fail(ErrorCode::kDimensionMismatch,
         "trajectory columns have inconsistent lengths");
  }
  for (std::size_t k = 1; k < len; ++k) {
    if (states[k].size() != states[0].size() ||
        outputs[k].size() != outputs[0].size() ||
        inputs[k].size() != inputs[0].size()) {
      fail(ErrorCode::kDimensionMismatch, "trajectory sample dimensions vary");
    }
  }
  if (len < 2) return;
  const double step = dt();
  if (!(step > 0.0)) fail(ErrorCode::kInvalidArgument, "times must increase");
  for (std::size_t k = 1; k < len; ++k) {
    const double gap = times[k] - times[k - 1];
    const double scale = std::max(step, std::abs(times[k]));
    if (std::abs(gap - step) > 1e-12 * scale) {
      fail(ErrorCode::kInvalidArgument,
           "times are not uniformly spaced at index " + std::to_string(k));
    }
  }
}

std::size_t step_count(double dt, double horizon) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    fail(ErrorCode::kInvalidArgument, "dt must be positive and finite");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    fail(ErrorCode::kInvalidArgument, "horizon must be positive and finite");
  }
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
    std::ostringstream msg;
    msg << "horizon/dt = " << ratio << " is not a positive integer";
    fail(ErrorCode::kInvalidArgument, msg.str());
  }
  return static_cast<std::size_t>(rounded);
}

Vector euler_step(const SystemModel& model, const Vector& x, const Vector& u,
                  double dt, std::size_t step_index) {
  if (!(dt > 0.0)) fail(ErrorCode::kInvalidArgument, "dt must be positive");
  Vector rate = model.drift(x);
  rate.noalias() += model.input_matrix * u;
  Vector next = x + dt * rate;
  if (!next.allFinite()) {
    throw Error(ErrorCode::kIntegrationDiverged, "non-finite state in " + model.name,
                step_index);
  }
  return next;
}

namespace {

Vector gaussian_vector(std::mt19937_64& rng, int size, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector w(size);
  for (int i = 0; i < size; ++i) w[i] = scale * normal(rng);
  return w;
}

}  // namespace

Trajectory simulate(const SystemModel& model, const Vector& x0, double dt,
                    double horizon, const NoiseSpec& noise) {
  model.validate();
  if (x0.size() != model.n) {
    fail(ErrorCode::kDimensionMismatch, "x0 has wrong dimension for " + model.name);
  }
  if (!x0.allFinite()) fail(ErrorCode::kInvalidArgument, "x0 must be finite");
  if (noise.stddev_scale < 0.0) {
    fail(ErrorCode::kInvalidArgument, "noise scale must be nonnegative");
  }
  const std::size_t steps = step_count(dt, horizon);
  const bool measurement_noise =
      noise.target == NoiseTarget::kMeasurement && noise.stddev_scale > 0.0;
  const bool process_noise =
      noise.target == NoiseTarget::kProcess && noise.stddev_scale > 0.0;
  std::mt19937_64 rng(noise.seed);

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.outputs.reserve(steps + 1);
  traj.inputs.reserve(steps + 1);

  Vector x = model.nonnegative ? project_nonnegative(x0) : x0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vector u = model.input(t);
    Vector y = model.output_map(x);
    if (measurement_noise) y += gaussian_vector(rng, model.m, noise.stddev_scale);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.outputs.push_back(std::move(y));
    traj.inputs.push_back(u);
    if (k == steps) break;
    Vector next = euler_step(model, x, u, dt, k);
    if (process_noise) next += dt * gaussian_vector(rng, model.n, noise.stddev_scale);
    x = model.nonnegative ? project_nonnegative(next) : std::move(next);
  }
  return traj;
}

Trajectory rk4_reference(const SystemModel& model, const Vector& x0, double dt,
                         double horizon) {
  model.validate();
  if (x0.size() != model.n) fail(ErrorCode::kDimensionMismatch, "x0 has wrong dimension");
  const std::size_t steps = step_count(dt, horizon);
  auto rate = [&](const Vector& x, double t) {
    Vector r = model.drift(x);
    r.noalias() += model.input_matrix * model.input(t);
    return r;
  };

  Trajectory traj;
  Vector x = x0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.outputs.push_back(model.output_map(x));
    traj.inputs.push_back(model.input(t));
    if (k == steps) break;
    const Vector k1 = rate(x, t);
    const Vector k2 = rate(x + 0.5 * dt * k1, t + 0.5 * dt);
    const Vector k3 = rate(x + 0.5 * dt * k2, t + 0.5 * dt);
    const Vector k4 = rate(x + dt * k3, t + dt);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) {
      throw Error(ErrorCode::kIntegrationDiverged, "non-finite RK4 state", k);
    }
  }
  return traj;
}

double ThreeTankParams::beta(int i) const {
  return flow_coeff[i] * pipe_area * std::sqrt(2.0 * gravity) / tank_area;
}

double signed_sqrt(double r) {
  if (r > 0.0) return std::sqrt(r);
  if (r < 0.0) return -std::sqrt(-r);
  return 0.0;
}

Vector project_nonnegative(const Vector& x) { return x.cwiseMax(0.0); }

namespace {

// d/dr sign(r) sqrt(|r|); clamped to 0 on the singular set.
double signed_sqrt_slope(double r) {
  const double mag = std::abs(r);
  return mag < 1e-12 ? 0.0 : 0.5 / std::sqrt(mag);
}

Matrix row_selector(int n, std::initializer_list<int> states) {
  Matrix c = Matrix::Zero(1, n);
  for (int i : states) c(0, i) = 1.0;
  return c;
}

SystemModel linear_output_model(std::string name, int n, Matrix c) {
  SystemModel model;
  model.name = std::move(name);
  model.n = n;
  model.m = static_cast<int>(c.rows());
  model.p = 1;  // unforced: a single zero input channel with B = 0
  model.input_matrix = Matrix::Zero(n, 1);
  model.output_structure = c;
  model.output_map = [c](const Vector& x) -> Vector { return c * x; };
  model.output_jacobian = [c](const Vector&) -> Matrix { return c; };
  return model;
}

SystemModel rossler() {
  constexpr double a = 0.2, b = 0.2, c = 5.7;
  SystemModel model = linear_output_model("rossler", 3, row_selector(3, {1}));
  model.drift = [](const Vector& x) -> Vector {
    return Vector{{-x[1] - x[2], x[0] + a * x[1], b + x[2] * (x[0] - c)}};
  };
  model.drift_jacobian = [](const Vector& x) -> Matrix {
    return Matrix{{0.0, -1.0, -1.0}, {1.0, a, 0.0}, {x[2], 0.0, x[0] - c}};
  };
  return model;
}

SystemModel harmonic() {
  SystemModel model = linear_output_model("harmonic", 3, row_selector(3, {0}));
  model.drift = [](const Vector& x) -> Vector {
    return Vector{{x[1], -x[2] * x[0], 0.0}};
  };
  model.drift_jacobian = [](const Vector& x) -> Matrix {
    return Matrix{{0.0, 1.0, 0.0}, {-x[2], 0.0, -x[0]}, {0.0, 0.0, 0.0}};
  };
  return model;
}

SystemModel autonomous(bool sum_output) {
  SystemModel model = linear_output_model(
      sum_output ? "autonomous_sum" : "autonomous", 2,
      sum_output ? row_selector(2, {0, 1}) : row_selector(2, {0}));
  model.drift = [](const Vector& x) -> Vector {
    return Vector{{x[1] + std::sin(x[0]), -x[0] + std::cos(x[1])}};
  };
  model.drift_jacobian = [](const Vector& x) -> Matrix {
    return Matrix{{std::cos(x[0]), 1.0}, {-1.0, -std::sin(x[1])}};
  };
  return model;
}

SystemModel academic(bool sum_output) {
  SystemModel model = linear_output_model(
      sum_output ? "academic_sum" : "academic", 2,
      sum_output ? row_selector(2, {0, 1}) : row_selector(2, {0}));
  model.drift = [](const Vector& x) -> Vector {
    const double r = std::sqrt(1.0 + x[0] * x[0]);
    return Vector{{x[1] * r, -x[0] / r * x[1] * x[1]}};
  };
  model.drift_jacobian = [](const Vector& x) -> Matrix {
    const double r = std::sqrt(1.0 + x[0] * x[0]);
    return Matrix{{x[1] * x[0] / r, r},
                  {-x[1] * x[1] / (r * r * r), -2.0 * x[0] * x[1] / r}};
  };
  return model;
}

SystemModel academic_mod() {
  SystemModel model = linear_output_model("academic_mod", 2, row_selector(2, {0}));
  model.drift = [](const Vector& x) -> Vector {
    const double q = std::sqrt(1.0 + x[1] * x[1]);
    return Vector{{x[1] * q, -x[0] / q * x[1] * x[1]}};
  };
  model.drift_jacobian = [](const Vector& x) -> Matrix {
    const double q = std::sqrt(1.0 + x[1] * x[1]);
    const double q3 = q * q * q;
    return Matrix{{0.0, (1.0 + 2.0 * x[1] * x[1]) / q},
                  {-x[1] * x[1] / q, -x[0] * (2.0 * x[1] + x[1] * x[1] * x[1]) / q3}};
  };
  return model;
}

SystemModel three_tank(const ThreeTankParams& tank) {
  SystemModel model = linear_output_model("three_tank", 3, row_selector(3, {1}));
  model.p = 2;
  model.input_matrix = Matrix::Zero(3, 2);
  model.input_matrix(0, 0) = 1.0 / tank.tank_area;
  model.input_matrix(2, 1) = 1.0 / tank.tank_area;
  const double b1 = tank.beta(0), b2 = tank.beta(1), b3 = tank.beta(2);
  // The outflow of tank 3 is treated as a connection to a level-0 reservoir,
  // which keeps the term defined for negative levels.
  model.drift = [=](const Vector& x) -> Vector {
    const double q12 = b1 * signed_sqrt(x[0] - x[1]);
    const double q23 = b2 * signed_sqrt(x[1] - x[2]);
    const double q30 = b3 * signed_sqrt(x[2]);
    return Vector{{-q12, q12 - q23, q23 - q30}};
  };
  model.drift_jacobian = [=](const Vector& x) -> Matrix {
    const double d12 = b1 * signed_sqrt_slope(x[0] - x[1]);
    const double d23 = b2 * signed_sqrt_slope(x[1] - x[2]);
    const double d30 = b3 * signed_sqrt_slope(x[2]);
    return Matrix{{-d12, d12, 0.0},
                  {d12, -d12 - d23, d23},
                  {0.0, d23, -d23 - d30}};
  };
  model.singular_set = [](const Vector& x, double tol) -> std::optional<std::string> {
    std::ostringstream msg;
    if (std::abs(x[0] - x[1]) <= tol) {
      msg << "x1 = x2 = " << x[0];
      return msg.str();
    }
    if (std::abs(x[1] - x[2]) <= tol) {
      msg << "x2 = x3 = " << x[1];
      return msg.str();
    }
    if (std::abs(x[2]) <= tol) {
      msg << "x3 = " << x[2];
      return msg.str();
    }
    return std::nullopt;
  };
  return model;
}

SystemModel reverse_duffing() {
  SystemModel model = linear_output_model("reverse_duffing", 2, row_selector(2, {0}));
  model.drift = [](const Vector& x) -> Vector {
    return Vector{{x[1] * x[1] * x[1], -x[0]}};
  };
  model.drift_jacobian = [](const Vector& x) -> Matrix {
    return Matrix{{0.0, 3.0 * x[1] * x[1]}, {-1.0, 0.0}};
  };
  return model;
}

SystemModel linear_chain() {
  SystemModel model = linear_output_model("linear_chain", 2, row_selector(2, {0}));
  model.drift = [](const Vector& x) -> Vector { return Vector{{x[1], 0.0}}; };
  model.drift_jacobian = [](const Vector&) -> Matrix {
    return Matrix{{0.0, 1.0}, {0.0, 0.0}};
  };
  return model;
}

}  // namespace

std::vector<std::string> builtin_model_names() {
  return {"rossler",      "harmonic",     "autonomous",
          "autonomous_sum", "academic",   "academic_sum",
          "academic_mod", "three_tank",   "reverse_duffing",
          "linear_chain"};
}

SystemModel builtin_model(std::string_view name, const ThreeTankParams& tank) {
  if (name == "rossler") return rossler();
  if (name == "harmonic") return harmonic();
  if (name == "autonomous") return autonomous(false);
  if (name == "autonomous_sum") return autonomous(true);
  if (name == "academic") return academic(false);
  if (name == "academic_sum") return academic(true);
  if (name == "academic_mod") return academic_mod();
  if (name == "three_tank") return three_tank(tank);
  if (name == "reverse_duffing") return reverse_duffing();
  if (name == "linear_chain") return linear_chain();
  fail(ErrorCode::kUnknownModel, "unknown model '" + std::string(name) + "'");
}

ControlSignal square_wave_control(const Vector& u_min, const Vector& u_max,
                                  double frequency) {
  if (!(frequency > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "square wave frequency must be positive");
  }
  if (u_min.size() != u_max.size()) {
    fail(ErrorCode::kDimensionMismatch, "u_min and u_max differ in size");
  }
  return [u_min, u_max, frequency](double t) -> Vector {
    return std::sin(5.0 * std::numbers::pi * frequency * t) > 0.0 ? u_max : u_min;
  };
}

SystemModel scale_output(SystemModel model, double c) {
  auto h = model.output_map;
  auto dh = model.output_jacobian;
  model.output_map = [h, c](const Vector& x) -> Vector { return c * h(x); };
  if (dh) {
    model.output_jacobian = [dh, c](const Vector& x) -> Matrix { return c * dh(x); };
  }
  return model;
}

}  // namespace softsensor
