/*
 * Copyright 2026 The mixrobust Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "mixrobust/shap.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "mixrobust/error.hpp"

namespace mixrobust {
namespace {

// Shapley values by averaging marginal contributions over every ordering.
std::vector<double> permutation_shapley(const std::vector<double>& beta,
                                        const std::vector<double>& row,
                                        const std::vector<double>& means) {
  const std::size_t p = beta.size();
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(p, 0.0);
  double count = 0.0;
  do {
    std::vector<double> current = means;
    for (std::size_t k : order) {
      double before = 0.0, after = 0.0;
      for (std::size_t j = 0; j < p; ++j) before += beta[j] * current[j];
      current[k] = row[k];
      for (std::size_t j = 0; j < p; ++j) after += beta[j] * current[j];
      phi[k] += after - before;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi) v /= count;
  return phi;
}

AnalysisDataset random_dataset(Rng& rng, std::size_t reps) {
  AnalysisDataset data;
  data.m = 3;
  data.h = 2;
  data.scenario = "balanced";
  data.response = "mean_auc";
  std::normal_distribution<double> noise(0.0, 0.05);
  for (std::size_t r = 0; r < reps; ++r) {
    for (double z1 : {1.0, 0.0}) {
      for (double z2 : {1.0, 0.0}) {
        for (const auto& p : simplex_centroid(3, 0.01)) {
          const double y = 0.5 + 0.3 * p[0] + 0.2 * p[1] * p[2] + 0.1 * z1 - 0.05 * z2 * p[2];
          data.rows.push_back({y + noise(rng), p.proportions, {z1, z2}});
        }
      }
    }
  }
  return data;
}

TEST(Shap, SingleFeature) {
  const std::vector<double> beta{2.0}, row{0.7}, means{0.2};
  const auto phi = exact_shapley_oracle(beta, row, means);
  ASSERT_EQ(phi.size(), 1U);
  EXPECT_NEAR(phi[0], 1.0, 1e-15);
  EXPECT_TRUE(exact_shapley_oracle({}, {}, {}).empty());
}

TEST(Shap, TwoFeatureExample) {
  const std::vector<double> beta{1.0, -3.0}, row{1.0, 0.5}, means{0.0, 0.0};
  const auto phi = exact_shapley_oracle(beta, row, means);
  EXPECT_NEAR(phi[0], 1.0, 1e-15);
  EXPECT_NEAR(phi[1], -1.5, 1e-15);
}

TEST(Shap, OracleRejectsLargeOrMismatchedInputs) {
  const std::vector<double> v21(21, 1.0), v3(3, 1.0), v2(2, 1.0);
  EXPECT_THROW(exact_shapley_oracle(v21, v21, v21), InvalidArgument);
  EXPECT_THROW(exact_shapley_oracle(v3, v2, v3), InvalidArgument);
  const std::vector<double> v20(20, 0.5);
  EXPECT_NO_THROW(exact_shapley_oracle(v20, v20, v20));
}

TEST(Shap, OracleMatchesPermutationDefinition) {
  Rng rng(31);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> dim(1, 7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = dim(rng);
    std::vector<double> beta(p), row(p), means(p);
    for (std::size_t j = 0; j < p; ++j) {
      beta[j] = normal(rng);
      row[j] = normal(rng);
      means[j] = normal(rng);
    }
    const auto want = permutation_shapley(beta, row, means);
    const auto got = exact_shapley_oracle(beta, row, means);
    for (std::size_t j = 0; j < p; ++j) EXPECT_NEAR(got[j], want[j], 1e-12);
  }
}

TEST(Shap, ClosedFormMatchesOracle) {
  Rng rng(32);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> dim(1, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = dim(rng);
    MixtureModelFit fit;
    ModelMatrix model;
    for (std::size_t j = 0; j < p; ++j) model.labels.push_back("c" + std::to_string(j));
    fit.labels = model.labels;
    fit.coefficients.resize(static_cast<Eigen::Index>(p));
    for (auto& b : fit.coefficients) b = normal(rng);
    model.values.resize(6, static_cast<Eigen::Index>(p));
    for (auto& v : model.values.reshaped()) v = normal(rng);
    const Eigen::MatrixXd phi = shap_per_observation(fit, model);
    const Eigen::VectorXd means = model.values.colwise().mean().transpose();
    const std::vector<double> beta(fit.coefficients.begin(), fit.coefficients.end());
    const std::vector<double> mu(means.begin(), means.end());
    for (Eigen::Index i = 0; i < model.values.rows(); ++i) {
      const Eigen::RowVectorXd r = model.values.row(i);
      const std::vector<double> row(r.begin(), r.end());
      const auto oracle = exact_shapley_oracle(beta, row, mu);
      double sum = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        EXPECT_NEAR(phi(i, static_cast<Eigen::Index>(j)), oracle[j], 1e-10);
        sum += oracle[j];
      }
      // Efficiency.
      EXPECT_NEAR(sum, fit.coefficients.dot(r.transpose() - means), 1e-10);
    }
  }
}

TEST(Shap, AdditivityOnFittedModel) {
  Rng rng(33);
  const AnalysisDataset data = random_dataset(rng, 3);
  const ModelMatrix mm = build_design_matrix(data);
  const MixtureModelFit fit = fit_ols(mm, response_vector(data));
  const ShapReport report = shap_report(fit, mm);
  const Eigen::VectorXd fitted = mm.values * fit.coefficients;
  const double mean_fitted = fitted.mean();
  for (Eigen::Index i = 0; i < mm.values.rows(); ++i) {
    EXPECT_NEAR(report.values.row(i).sum() + mean_fitted, fitted(i), 1e-10);
  }
  EXPECT_LE((report.importance - report.values.cwiseAbs().colwise().mean().transpose())
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
}

TEST(Shap, ScalingResponseScalesImportance) {
  Rng rng(34);
  AnalysisDataset data = random_dataset(rng, 3);
  const ModelMatrix mm = build_design_matrix(data);
  const Eigen::VectorXd y = response_vector(data);
  const ShapReport a = shap_report(fit_ols(mm, y), mm);
  const ShapReport b = shap_report(fit_ols(mm, -2.5 * y), mm);
  EXPECT_LE((b.importance - 2.5 * a.importance).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Shap, ShiftAbsorbedByLinearBlendingTerms) {
  // y + c is expressible as y + c * sum(x). Only the linear coefficients move,
  // so every other column keeps its values and each row's total is unchanged.
  Rng rng(35);
  AnalysisDataset data = random_dataset(rng, 3);
  const ModelMatrix mm = build_design_matrix(data);
  const Eigen::VectorXd y = response_vector(data);
  const double c = 4.0;
  const MixtureModelFit fa = fit_ols(mm, y);
  const MixtureModelFit fb = fit_ols(mm, (y.array() + c).matrix());
  const ShapReport a = shap_report(fa, mm);
  const ShapReport b = shap_report(fb, mm);
  for (Eigen::Index j = 0; j < 3; ++j) {
    EXPECT_NEAR(fb.coefficients(j) - fa.coefficients(j), c, 1e-9);
  }
  EXPECT_LE((b.values.rightCols(10) - a.values.rightCols(10)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((b.importance.tail(10) - a.importance.tail(10)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((b.values.rowwise().sum() - a.values.rowwise().sum()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Shap, RejectsMismatchedInputs) {
  MixtureModelFit fit;
  fit.labels = {"a", "b"};
  fit.coefficients = Eigen::Vector2d(1, 2);
  ModelMatrix model;
  model.labels = {"a", "c"};
  model.values = Eigen::MatrixXd::Ones(2, 2);
  EXPECT_THROW(shap_per_observation(fit, model), InvalidArgument);
  model.labels = fit.labels;
  model.values.resize(0, 2);
  EXPECT_THROW(shap_per_observation(fit, model), InvalidArgument);
}

TEST(Shap, ReportJsonSortedDescending) {
  ShapReport report;
  report.labels = {"x1", "x2", "x3"};
  report.values = Eigen::MatrixXd::Zero(2, 3);
  report.importance = Eigen::Vector3d(0.1, 0.5, 0.3);
  report.background_means = Eigen::Vector3d(0.2, 0.3, 0.5);
  const auto j = shap_report_json(report, "reverse", "log_sd");
  ASSERT_EQ(j.at("terms").size(), 3U);
  EXPECT_EQ(j["terms"][0]["label"], "x2");
  EXPECT_EQ(j["terms"][1]["label"], "x3");
  EXPECT_EQ(j["terms"][2]["label"], "x1");
  EXPECT_EQ(j["background_means"]["x3"].get<double>(), 0.5);
  EXPECT_EQ(j["n"].get<int>(), 2);

  std::ostringstream csv;
  write_shap_values_csv(csv, report);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "row,phi_x1,phi_x2,phi_x3");
}

}  // namespace
}  // namespace mixrobust
