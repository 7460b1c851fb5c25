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

#ifndef SOFTSENSOR_CORE_METRICS_HPP
#define SOFTSENSOR_CORE_METRICS_HPP

#include <optional>
#include <vector>

#include <json.hpp>

#include "core/systems.hpp"

namespace softsensor {

/// |x_k^i - xhat_k^i| for every sample k; one vector of length n per sample.
struct ErrorSeries {
  std::vector<double> times;
  std::vector<Vector> abs_error;

  /// sqrt(mean_i e_i^2) at each sample.
  std::vector<double> rmse_over_states() const;
};

struct MetricsReport {
  double mae = 0.0;
  double rmse = 0.0;
  double mse = 0.0;
  double smape_percent = 0.0;
  Vector per_state_mae;  // mean over the window, per state
  double burn_in_s = 0.0;
  std::size_t samples = 0;  // time samples inside the window
  ErrorSeries errors;       // full series, including burn-in
  std::optional<double> convergence_time_s;
};

ErrorSeries pointwise_abs_error(const Trajectory& x, const Trajectory& xhat);

/// Averages over all states and every sample with t - t_0 >= burn_in.
MetricsReport aggregate_metrics(const Trajectory& x, const Trajectory& xhat,
                                double burn_in = 0.0);

/// First sample time t* such that the RMSE over states stays below
/// `threshold` on every sample of [t*, t* + dwell]. The window must fit
/// inside the record.
std::optional<double> convergence_time(const ErrorSeries& errors, double threshold,
                                       double dwell);

/// Mean of each scalar metric over several reports.
MetricsReport mean_report(const std::vector<MetricsReport>& reports);

nlohmann::json report_to_json(const MetricsReport& report);

/// Column order MSE,RMSE,MAE,SMAPE%.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& report);

}  // namespace softsensor

#endif  // SOFTSENSOR_CORE_METRICS_HPP
