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

#include "core/diagnostics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "core/error.hpp"

namespace softsensor {

namespace {

constexpr double kRelativeStep = 1e-6;

Matrix central_difference(const VectorField& fn, const Vector& x, Eigen::Index rows) {
  Matrix jac(rows, x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = kRelativeStep * (1.0 + std::abs(x[i]));
    Vector plus = x, minus = x;
    plus[i] += h;
    minus[i] -= h;
    jac.col(i) = (fn(plus) - fn(minus)) / (plus[i] - minus[i]);
  }
  return jac;
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

Jacobians jacobians(const SystemModel& model, const Vector& x, double dt) {
  model.validate();
  if (x.size() != model.n) fail(ErrorCode::kDimensionMismatch, "point has wrong dimension");
  if (model.singular_set) {
    const double tol = 4.0 * kRelativeStep * (1.0 + x.cwiseAbs().maxCoeff());
    if (auto where = model.singular_set(x, tol)) {
      fail(ErrorCode::kSingularSet,
           model.name + " is not differentiable at the requested point: " + *where);
    }
  }
  const VectorField discrete = [&](const Vector& v) -> Vector {
    return v + dt * model.drift(v);
  };
  return {central_difference(discrete, x, model.n),
          central_difference(model.output_map, x, model.m)};
}

std::vector<Vector> segment_from_point(const SystemModel& model, const Vector& x,
                                       std::size_t horizon, double dt) {
  std::vector<Vector> segment{x};
  for (std::size_t k = 0; k < horizon; ++k) {
    const double t = static_cast<double>(k) * dt;
    segment.push_back(euler_step(model, segment.back(), model.input(t), dt, k));
  }
  return segment;
}

ObservabilityReport observability_matrix(const SystemModel& model,
                                         const std::vector<Vector>& segment,
                                         std::size_t horizon, double dt,
                                         std::string label) {
  if (segment.size() < horizon + 1) {
    fail(ErrorCode::kInvalidArgument, "segment shorter than horizon + 1");
  }
  const int n = model.n;
  const int m = model.m;
  ObservabilityReport report;
  report.horizon = horizon;
  report.point = segment.front();
  report.label = std::move(label);
  report.observability.resize(static_cast<Eigen::Index>(m * (horizon + 1)), n);

  Matrix transition = Matrix::Identity(n, n);  // F_{k+i-1} ... F_k
  for (std::size_t i = 0; i <= horizon; ++i) {
    const Jacobians jac = jacobians(model, segment[i], dt);
    report.observability.middleRows(static_cast<Eigen::Index>(i * m), m) =
        jac.output * transition;
    transition = jac.discrete_drift * transition;
    report.sup_state_norm = std::max(report.sup_state_norm, segment[i].norm());
    report.sup_drift_jacobian_norm =
        std::max(report.sup_drift_jacobian_norm, jac.discrete_drift.operatorNorm());
    report.sup_output_jacobian_norm =
        std::max(report.sup_output_jacobian_norm, jac.output.operatorNorm());
  }

  Eigen::JacobiSVD<Matrix> svd(report.observability);
  report.singular_values = svd.singularValues();
  const double sigma_max = report.singular_values.size() ? report.singular_values[0] : 0.0;
  const auto max_dim = std::max(report.observability.rows(), report.observability.cols());
  report.rank_tolerance =
      static_cast<double>(max_dim) * std::numeric_limits<double>::epsilon() * sigma_max;
  report.rank = static_cast<std::size_t>(
      (report.singular_values.array() > report.rank_tolerance).count());

  const Matrix gramian = report.observability.transpose() * report.observability;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gramian);
  report.gramian_lower = eig.eigenvalues().minCoeff();
  report.gramian_upper = eig.eigenvalues().maxCoeff();
  report.gramian_singular_values = Eigen::JacobiSVD<Matrix>(gramian).singularValues();
  return report;
}

nlohmann::json report_to_json(const ObservabilityReport& report) {
  nlohmann::json doc;
  doc["horizon"] = report.horizon;
  doc["rank"] = report.rank;
  doc["state_dim"] = report.observability.cols();
  doc["rank_tolerance"] = report.rank_tolerance;
  doc["singular_values"] = to_std(report.singular_values);
  doc["gramian_singular_values"] = to_std(report.gramian_singular_values);
  doc["gramian_lower"] = report.gramian_lower;
  doc["gramian_upper"] = report.gramian_upper;
  doc["point"] = to_std(report.point);
  doc["evaluated_along"] = report.label;
  doc["sup_state_norm"] = report.sup_state_norm;
  doc["sup_drift_jacobian_norm"] = report.sup_drift_jacobian_norm;
  doc["sup_output_jacobian_norm"] = report.sup_output_jacobian_norm;
  return doc;
}

std::string format_table(const ObservabilityReport& report) {
  std::ostringstream out;
  char line[128];
  auto row = [&](const char* key, const std::string& value) {
    std::snprintf(line, sizeof(line), "%-26s %s\n", key, value.c_str());
    out << line;
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return std::string(buf);
  };
  std::string point;
  for (Eigen::Index i = 0; i < report.point.size(); ++i) {
    point += (i ? ", " : "") + num(report.point[i]);
  }
  row("evaluated along", report.label);
  row("point", "[" + point + "]");
  row("horizon N", std::to_string(report.horizon));
  row("rank / n", std::to_string(report.rank) + " / " +
                      std::to_string(report.observability.cols()));
  row("rank tolerance", num(report.rank_tolerance));
  for (Eigen::Index i = 0; i < report.singular_values.size(); ++i) {
    row(("sigma_" + std::to_string(i + 1)).c_str(), num(report.singular_values[i]));
  }
  row("gramian lower", num(report.gramian_lower));
  row("gramian upper", num(report.gramian_upper));
  row("sup |x|", num(report.sup_state_norm));
  row("sup |F|", num(report.sup_drift_jacobian_norm));
  row("sup |H|", num(report.sup_output_jacobian_norm));
  return out.str();
}

}  // namespace softsensor
