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

#ifndef SOFTSENSOR_CORE_SYSTEMS_HPP
#define SOFTSENSOR_CORE_SYSTEMS_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace softsensor {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using VectorField = std::function<Vector(const Vector&)>;
using JacobianField = std::function<Matrix(const Vector&)>;
using ControlSignal = std::function<Vector(double)>;
/// Returns a description of the violated condition when x lies within `tol`
/// of a point where the drift is not differentiable.
using SingularSetCheck =
    std::function<std::optional<std::string>(const Vector&, double tol)>;

/// Continuous-time benchmark x' = f_c(x) + B u(t), y = h(x).
///
/// The discrete map used everywhere else is the explicit Euler step
/// x + dt (f_c(x) + B u). Unforced systems carry one input with B = 0.
struct SystemModel {
  std::string name;
  int n = 0;
  int m = 0;
  int p = 0;
  VectorField drift;
  JacobianField drift_jacobian;
  VectorField output_map;
  JacobianField output_jacobian;
  Matrix input_matrix;  // n x p
  ControlSignal control;
  /// m x n 0/1 pattern of which states each output channel reads. Used to
  /// lift output-space corrections into state space.
  Matrix output_structure;
  /// Clamp states to x >= 0 after every step (tank levels).
  bool nonnegative = false;
  SingularSetCheck singular_set;

  void validate() const;
  Vector input(double t) const;
};

enum class NoiseTarget { kNone, kMeasurement, kProcess };

struct NoiseSpec {
  NoiseTarget target = NoiseTarget::kNone;
  double stddev_scale = 0.0;
  std::uint64_t seed = 0;
};

NoiseTarget parse_noise_target(std::string_view text);
const char* to_string(NoiseTarget target);

/// Uniformly sampled record t_0..t_N with matching states, outputs and inputs.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> outputs;
  std::vector<Vector> inputs;

  std::size_t size() const { return times.size(); }
  double dt() const;
  double horizon() const;
  void validate() const;
};

/// Number of Euler steps N = horizon / dt; rejects ratios that are not an
/// integer to within 1e-9 relative.
std::size_t step_count(double dt, double horizon);

Vector euler_step(const SystemModel& model, const Vector& x, const Vector& u,
                  double dt, std::size_t step_index = 0);

Trajectory simulate(const SystemModel& model, const Vector& x0, double dt,
                    double horizon, const NoiseSpec& noise = {});

/// Classical fixed-step RK4; only used as an accuracy oracle.
Trajectory rk4_reference(const SystemModel& model, const Vector& x0, double dt,
                         double horizon);

/// Physical constants of the three-tank benchmark. The defaults are a
/// representative lab-scale set, not measured values.
struct ThreeTankParams {
  double tank_area = 0.0154;    // S_T [m^2]
  double pipe_area = 5.0e-4;    // S_p [m^2]
  double flow_coeff[3] = {0.5, 0.5, 0.5};  // gamma_z1..3
  double gravity = 9.81;

  double beta(int i) const;
};

std::vector<std::string> builtin_model_names();
SystemModel builtin_model(std::string_view name, const ThreeTankParams& tank = {});

/// u(t) = u_max when sin(5 pi f t) > 0, else u_min.
ControlSignal square_wave_control(const Vector& u_min, const Vector& u_max,
                                  double frequency);

/// Same model with h scaled by c.
SystemModel scale_output(SystemModel model, double c);

/// sign(r) sqrt(|r|) with sign(0) = 0.
double signed_sqrt(double r);

/// Componentwise max(x, 0).
Vector project_nonnegative(const Vector& x);

}  // namespace softsensor

#endif  // SOFTSENSOR_CORE_SYSTEMS_HPP
