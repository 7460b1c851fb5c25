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

#ifndef SOFTSENSOR_CORE_DIAGNOSTICS_HPP
#define SOFTSENSOR_CORE_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "core/systems.hpp"

namespace softsensor {

struct Jacobians {
  Matrix discrete_drift;  // F = d/dx (x + dt f_c(x)), n x n
  Matrix output;          // H = dh/dx, m x n
};

/// Central finite differences with step 1e-6 (1 + |x_i|). Throws
/// kSingularSet when x is within the stencil of a non-differentiable point.
Jacobians jacobians(const SystemModel& model, const Vector& x, double dt);

struct ObservabilityReport {
  std::size_t horizon = 0;
  std::size_t rank = 0;
  double rank_tolerance = 0.0;
  Vector singular_values;          // of the stacked observability matrix
  Vector gramian_singular_values;  // of sum (H Phi)^T (H Phi), descending
  double gramian_lower = 0.0;      // smallest Gramian eigenvalue
  double gramian_upper = 0.0;      // largest Gramian eigenvalue
  Vector point;                    // first sample of the segment
  std::string label;               // which trajectory the Jacobians follow
  // Sup-norms over the segment (boundedness of trajectory and Jacobians).
  double sup_state_norm = 0.0;
  double sup_drift_jacobian_norm = 0.0;
  double sup_output_jacobian_norm = 0.0;
  Matrix observability;
};

/// Stacks H_k, H_{k+1} F_k, ..., H_{k+N} F_{k+N-1} ... F_k along `segment`
/// and reports its rank and the Gramian spectrum.
ObservabilityReport observability_matrix(const SystemModel& model,
                                         const std::vector<Vector>& segment,
                                         std::size_t horizon, double dt,
                                         std::string label = "supplied");

/// Noise-free Euler segment of `horizon` + 1 states starting at x.
std::vector<Vector> segment_from_point(const SystemModel& model, const Vector& x,
                                       std::size_t horizon, double dt);

nlohmann::json report_to_json(const ObservabilityReport& report);
std::string format_table(const ObservabilityReport& report);

}  // namespace softsensor

#endif  // SOFTSENSOR_CORE_DIAGNOSTICS_HPP
