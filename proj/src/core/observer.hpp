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

#ifndef SOFTSENSOR_CORE_OBSERVER_HPP
#define SOFTSENSOR_CORE_OBSERVER_HPP

#include <functional>
#include <string_view>

#include "core/systems.hpp"

namespace softsensor {

/// How the sliding-mode term enters the state update.
///
/// kLiteral adds nu = -K tanh(s) with s = y - yhat as written, which moves
/// the estimate away from the measurement. kReaching adds -nu, so the term
/// drives s toward zero.
enum class SmcPolarity { kReaching, kLiteral };

SmcPolarity parse_smc_polarity(std::string_view text);
const char* to_string(SmcPolarity polarity);

struct SmcConfig {
  double k0 = 5.0;     // base gain, > 0
  double alpha = 0.01; // adaptation rate on ||s||^2, >= 0
  SmcPolarity polarity = SmcPolarity::kReaching;

  void validate() const;
};

struct ObserverState {
  Vector xhat;
  std::size_t step = 0;
  Vector last_surface;
  Matrix last_gain;
  Vector last_smc;
};

/// s = y - yhat.
Vector sliding_surface(const Vector& y, const Vector& yhat);

/// K = k0 + alpha ||s||^2.
double adaptive_gain(const Vector& s, const SmcConfig& cfg);

/// nu = -K H^T tanh(s), where H is the m x n output structure of the model.
Vector smc_correction(const Vector& s, const SmcConfig& cfg,
                      const Matrix& channel_map);

/// Estimate magnitude beyond which the observer is declared diverged.
inline constexpr double kDivergenceBound = 1e9;

/// One observer update:
///   xhat' = xhat + dt (f_c(xhat) + B u + L s + nu_applied)
/// followed by the non-negativity projection when `project` is set.
ObserverState observer_step(const SystemModel& model, const ObserverState& state,
                            const Matrix& gain, const Vector& y_meas,
                            const Vector& u, double dt, const SmcConfig& cfg,
                            bool project);

using GainProvider =
    std::function<Matrix(double t, const Vector& u, const Vector& y)>;

/// Replays the observer over the measured outputs of `traj`. The result holds
/// xhat in `states` and yhat in `outputs`, aligned with traj.times.
Trajectory run_observer(const SystemModel& model, const Trajectory& traj,
                        const GainProvider& gains, const Vector& xhat0,
                        const SmcConfig& cfg);

}  // namespace softsensor

#endif  // SOFTSENSOR_CORE_OBSERVER_HPP
