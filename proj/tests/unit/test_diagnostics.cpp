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

#include <gtest/gtest.h>

#include <random>

#include "core/diagnostics.hpp"
#include "core/error.hpp"
#include "test_util.hpp"

namespace softsensor {
namespace {

TEST(Jacobians, HarmonicMatchesHandDerivative) {
  const SystemModel model = builtin_model("harmonic");
  const double dt = 0.01;
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = test::random_vector(rng, 3, -3.0, 3.0);
    const Matrix hand{{0.0, 1.0, 0.0}, {-x[2], 0.0, -x[0]}, {0.0, 0.0, 0.0}};
    const Jacobians jac = jacobians(model, x, dt);
    const Matrix expected = Matrix::Identity(3, 3) + dt * hand;
    EXPECT_LT((jac.discrete_drift - expected).norm(), 1e-8);
    EXPECT_TRUE(jac.output.isApprox(Matrix{{1.0, 0.0, 0.0}}, 1e-9));
  }
}

TEST(Jacobians, AnalyticOraclesForFirstThreeExamples) {
  std::mt19937_64 rng(4);
  for (const char* name : {"rossler", "harmonic", "autonomous"}) {
    const SystemModel model = builtin_model(name);
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = test::random_vector(rng, model.n, -2.0, 2.0);
      const Matrix fd = (jacobians(model, x, 1.0).discrete_drift -
                         Matrix::Identity(model.n, model.n));
      const Matrix analytic = model.drift_jacobian(x);
      EXPECT_LT((fd - analytic).norm(), 1e-6 * (1.0 + analytic.norm())) << name;
    }
  }
}

TEST(Jacobians, LinearOutputsAreExact) {
  const Vector x3{{0.3, -0.8, 1.9}};
  EXPECT_TRUE(jacobians(builtin_model("rossler"), x3, 0.01)
                  .output.isApprox(Matrix{{0.0, 1.0, 0.0}}, 1e-10));
  const Vector x2{{0.3, -0.8}};
  EXPECT_TRUE(jacobians(builtin_model("academic_sum"), x2, 0.01)
                  .output.isApprox(Matrix{{1.0, 1.0}}, 1e-10));
}

TEST(Jacobians, ThreeTankSingularSet) {
  const SystemModel model = builtin_model("three_tank");
  for (const Vector& x : {Vector{{0.5, 0.5, 0.2}}, Vector{{0.6, 0.3, 0.3}},
                          Vector{{0.6, 0.3, 0.0}}}) {
    try {
      jacobians(model, x, 0.01);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kSingularSet);
      EXPECT_NE(std::string(e.what()).find('x'), std::string::npos);
    }
  }
  EXPECT_NO_THROW(jacobians(model, Vector{{0.6, 0.4, 0.2}}, 0.01));
}

TEST(Observability, LinearChainRankTwo) {
  const SystemModel model = builtin_model("linear_chain");
  const auto segment = segment_from_point(model, Vector{{1.0, 0.5}}, 1, 0.1);
  const ObservabilityReport report = observability_matrix(model, segment, 1, 0.1);
  EXPECT_EQ(report.rank, 2u);
  EXPECT_TRUE(report.observability.isApprox(Matrix{{1.0, 0.0}, {1.0, 0.1}}, 1e-8));
}

TEST(Observability, HarmonicGenericAndDegenerate) {
  const SystemModel model = builtin_model("harmonic");
  const double dt = 0.01;
  const Vector generic{{0.3, 0.7, 1.1}};
  auto report_at = [&](const SystemModel& m, const Vector& x) {
    return observability_matrix(m, segment_from_point(m, x, 2, dt), 2, dt);
  };
  EXPECT_EQ(report_at(model, generic).rank, 3u);
  EXPECT_LT(report_at(model, Vector{{0.0, 0.0, 1.1}}).rank, 3u);
  // Random generic points are full rank; rank ignores output scaling.
  std::mt19937_64 rng(8);
  const SystemModel scaled = scale_output(model, 7.3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = test::random_vector(rng, 3, 0.2, 2.0);
    const auto base = report_at(model, x);
    EXPECT_EQ(base.rank, 3u);
    EXPECT_EQ(report_at(scaled, x).rank, base.rank);
  }
}

TEST(Observability, GramianIsPositiveSemidefinite) {
  std::mt19937_64 rng(10);
  for (const char* name : {"rossler", "harmonic", "autonomous", "academic_mod"}) {
    const SystemModel model = builtin_model(name);
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = test::random_vector(rng, model.n, -2.0, 2.0);
      const auto report =
          observability_matrix(model, segment_from_point(model, x, 3, 0.01), 3, 0.01);
      EXPECT_GE(report.gramian_lower, -1e-12 * report.gramian_upper) << name;
      EXPECT_LE(report.gramian_lower, report.gramian_upper);
      EXPECT_LE(report.rank, static_cast<std::size_t>(model.n));
      EXPECT_GE(report.singular_values.minCoeff(), 0.0);
    }
  }
}

TEST(Observability, ReportsBoundsAndShortSegment) {
  const SystemModel model = builtin_model("autonomous");
  const auto segment = segment_from_point(model, Vector{{1.0, 1.0}}, 2, 0.01);
  EXPECT_THROW(observability_matrix(model, segment, 3, 0.01), Error);
  const auto report = observability_matrix(model, segment, 2, 0.01, "supplied");
  EXPECT_GE(report.sup_state_norm, std::sqrt(2.0));
  EXPECT_GT(report.sup_drift_jacobian_norm, 0.0);
  EXPECT_NEAR(report.sup_output_jacobian_norm, 1.0, 1e-8);
  const auto doc = report_to_json(report);
  EXPECT_EQ(doc["rank"], 2);
  EXPECT_EQ(doc["evaluated_along"], "supplied");
  EXPECT_NE(format_table(report).find("rank / n"), std::string::npos);
}

}  // namespace
}  // namespace softsensor
