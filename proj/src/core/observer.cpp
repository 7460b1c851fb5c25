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

#include "core/observer.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace softsensor {

SmcPolarity parse_smc_polarity(std::string_view text) {
  if (text == "reaching") return SmcPolarity::kReaching;
  if (text == "literal") return SmcPolarity::kLiteral;
  fail(ErrorCode::kConfig, "unknown smc polarity '" + std::string(text) + "'");
}

const char* to_string(SmcPolarity polarity) {
  return polarity == SmcPolarity::kReaching ? "reaching" : "literal";
}

void SmcConfig::validate() const {
  if (!(k0 > 0.0)) fail(ErrorCode::kInvalidArgument, "smc k0 must be positive");
  if (!(alpha >= 0.0)) fail(ErrorCode::kInvalidArgument, "smc alpha must be >= 0");
}

Vector sliding_surface(const Vector& y, const Vector& yhat) {
  if (y.size() != yhat.size()) {
    fail(ErrorCode::kDimensionMismatch, "sliding surface operands differ in size");
  }
  return y - yhat;
}

double adaptive_gain(const Vector& s, const SmcConfig& cfg) {
  return cfg.k0 + cfg.alpha * s.squaredNorm();
}

Vector smc_correction(const Vector& s, const SmcConfig& cfg,
                      const Matrix& channel_map) {
  if (channel_map.rows() != s.size()) {
    fail(ErrorCode::kDimensionMismatch, "channel map rows must equal surface size");
  }
  const double gain = adaptive_gain(s, cfg);
  const Vector squashed = s.array().tanh().matrix();
  return -gain * (channel_map.transpose() * squashed);
}

ObserverState observer_step(const SystemModel& model, const ObserverState& state,
                            const Matrix& gain, const Vector& y_meas,
                            const Vector& u, double dt, const SmcConfig& cfg,
                            bool project) {
  if (gain.rows() != model.n || gain.cols() != model.m) {
    fail(ErrorCode::kDimensionMismatch, "observer gain must be n x m");
  }
  if (state.xhat.size() != model.n || y_meas.size() != model.m) {
    fail(ErrorCode::kDimensionMismatch, "observer state or measurement size");
  }
  ObserverState next;
  next.step = state.step + 1;
  next.last_surface = sliding_surface(y_meas, model.output_map(state.xhat));
  next.last_gain = gain;
  next.last_smc = smc_correction(next.last_surface, cfg, model.output_structure);

  Vector rate = model.drift(state.xhat);
  rate.noalias() += model.input_matrix * u;
  rate.noalias() += gain * next.last_surface;
  if (cfg.polarity == SmcPolarity::kReaching) {
    rate -= next.last_smc;
  } else {
    rate += next.last_smc;
  }
  next.xhat = state.xhat + dt * rate;
  if (project) next.xhat = project_nonnegative(next.xhat);

  if (!next.xhat.allFinite() || next.xhat.cwiseAbs().maxCoeff() > kDivergenceBound) {
    throw Error(ErrorCode::kObserverDiverged, "estimate left the finite region",
                state.step);
  }
  return next;
}

Trajectory run_observer(const SystemModel& model, const Trajectory& traj,
                        const GainProvider& gains, const Vector& xhat0,
                        const SmcConfig& cfg) {
  traj.validate();
  cfg.validate();
  if (xhat0.size() != model.n || !xhat0.allFinite()) {
    fail(ErrorCode::kInvalidArgument, "xhat0 must be finite with dimension n");
  }
  const double dt = traj.dt();
  Trajectory estimate;
  estimate.times = traj.times;
  estimate.inputs = traj.inputs;
  estimate.states.reserve(traj.size());
  estimate.outputs.reserve(traj.size());

  ObserverState state;
  state.xhat = model.nonnegative ? project_nonnegative(xhat0) : xhat0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    estimate.states.push_back(state.xhat);
    estimate.outputs.push_back(model.output_map(state.xhat));
    if (k + 1 == traj.size()) break;
    const Matrix gain = gains(traj.times[k], traj.inputs[k], traj.outputs[k]);
    state = observer_step(model, state, gain, traj.outputs[k], traj.inputs[k], dt,
                          cfg, model.nonnegative);
  }
  return estimate;
}

}  // namespace softsensor
