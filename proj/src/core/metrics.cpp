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

#include "core/metrics.hpp"

#include <cmath>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace softsensor {

std::vector<double> ErrorSeries::rmse_over_states() const {
  std::vector<double> out;
  out.reserve(abs_error.size());
  for (const auto& e : abs_error) {
    out.push_back(std::sqrt(e.squaredNorm() / static_cast<double>(e.size())));
  }
  return out;
}

ErrorSeries pointwise_abs_error(const Trajectory& x, const Trajectory& xhat) {
  x.validate();
  xhat.validate();
  if (x.size() != xhat.size() || x.states[0].size() != xhat.states[0].size()) {
    fail(ErrorCode::kDimensionMismatch, "trajectories are not aligned");
  }
  ErrorSeries series;
  series.times = x.times;
  series.abs_error.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double gap = std::abs(x.times[k] - xhat.times[k]);
    if (gap > 1e-9 * std::max(1.0, std::abs(x.times[k]))) {
      fail(ErrorCode::kDimensionMismatch,
           "trajectory times differ at sample " + std::to_string(k));
    }
    series.abs_error.push_back((x.states[k] - xhat.states[k]).cwiseAbs());
  }
  return series;
}

MetricsReport aggregate_metrics(const Trajectory& x, const Trajectory& xhat,
                                double burn_in) {
  MetricsReport report;
  report.errors = pointwise_abs_error(x, xhat);
  report.burn_in_s = burn_in;
  const Eigen::Index n = x.states[0].size();
  const double start = x.times.front() + burn_in - 1e-9 * std::max(x.dt(), 1e-12);

  double abs_sum = 0.0, sq_sum = 0.0, smape_sum = 0.0;
  Vector per_state = Vector::Zero(n);
  std::size_t count = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x.times[k] < start) continue;
    ++count;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = report.errors.abs_error[k][i];
      abs_sum += e;
      sq_sum += e * e;
      per_state[i] += e;
      const double denom = 0.5 * (std::abs(x.states[k][i]) + std::abs(xhat.states[k][i]));
      if (denom > 0.0) smape_sum += e / denom;
    }
  }
  if (count == 0) fail(ErrorCode::kInvalidArgument, "no samples after burn-in");
  const double entries = static_cast<double>(count) * static_cast<double>(n);
  report.samples = count;
  report.mae = abs_sum / entries;
  report.mse = sq_sum / entries;
  report.rmse = std::sqrt(report.mse);
  report.smape_percent = 100.0 * smape_sum / entries;
  report.per_state_mae = per_state / static_cast<double>(count);
  return report;
}

std::optional<double> convergence_time(const ErrorSeries& errors, double threshold,
                                       double dwell) {
  if (!(threshold > 0.0)) fail(ErrorCode::kInvalidArgument, "threshold must be positive");
  if (!(dwell >= 0.0)) fail(ErrorCode::kInvalidArgument, "dwell must be nonnegative");
  const auto rmse = errors.rmse_over_states();
  const std::size_t len = rmse.size();
  if (len == 0) return std::nullopt;
  const double end = errors.times.back();
  const double slack = 1e-9 * std::max(1.0, std::abs(end));
  // next_bad[k]: first index >= k whose RMSE reaches the threshold.
  std::vector<std::size_t> next_bad(len + 1, len);
  for (std::size_t k = len; k-- > 0;) {
    next_bad[k] = rmse[k] >= threshold ? k : next_bad[k + 1];
  }
  for (std::size_t k = 0; k < len; ++k) {
    const double t = errors.times[k];
    if (t + dwell > end + slack) break;
    if (next_bad[k] == len || errors.times[next_bad[k]] > t + dwell + slack) {
      return t - errors.times.front();
    }
  }
  return std::nullopt;
}

MetricsReport mean_report(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) fail(ErrorCode::kInvalidArgument, "no reports to average");
  MetricsReport mean;
  mean.per_state_mae = Vector::Zero(reports[0].per_state_mae.size());
  double converged = 0.0;
  std::size_t converged_count = 0;
  for (const auto& r : reports) {
    mean.mae += r.mae;
    mean.rmse += r.rmse;
    mean.mse += r.mse;
    mean.smape_percent += r.smape_percent;
    mean.per_state_mae += r.per_state_mae;
    mean.samples += r.samples;
    if (r.convergence_time_s) {
      converged += *r.convergence_time_s;
      ++converged_count;
    }
  }
  const double count = static_cast<double>(reports.size());
  mean.mae /= count;
  mean.rmse /= count;
  mean.mse /= count;
  mean.smape_percent /= count;
  mean.per_state_mae /= count;
  mean.burn_in_s = reports[0].burn_in_s;
  // Only defined when every trajectory converged.
  if (converged_count == reports.size()) mean.convergence_time_s = converged / count;
  return mean;
}

nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json doc;
  doc["mse"] = report.mse;
  doc["rmse"] = report.rmse;
  doc["mae"] = report.mae;
  doc["smape_percent"] = report.smape_percent;
  doc["per_state_mae"] = std::vector<double>(
      report.per_state_mae.data(), report.per_state_mae.data() + report.per_state_mae.size());
  doc["burn_in_s"] = report.burn_in_s;
  doc["aggregation"] = "mean over states and samples with t >= burn_in";
  doc["samples"] = report.samples;
  doc["convergence_time_s"] =
      report.convergence_time_s ? nlohmann::json(*report.convergence_time_s) : nlohmann::json();
  return doc;
}

std::string metrics_csv_header() { return "MSE,RMSE,MAE,SMAPE%"; }

std::string metrics_csv_row(const MetricsReport& report) {
  return format_double(report.mse) + ',' + format_double(report.rmse) + ',' +
         format_double(report.mae) + ',' + format_double(report.smape_percent);
}

}  // namespace softsensor
