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
#include "mixrobust/mixmodel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mixrobust/error.hpp"
#include "mixrobust/student_t.hpp"

namespace mixrobust {
namespace {

constexpr double kThird = 1.0 / 3.0;

// Complete 28-run cross-array with the given replicates; y left at zero.
AnalysisDataset reference_design(int replicates = 3) {
  AnalysisDataset data;
  data.m = 3;
  data.h = 2;
  data.scenario = "balanced";
  data.response = "mean_auc";
  for (int r = 0; r < replicates; ++r) {
    for (double z1 : {1.0, 0.0}) {
      for (double z2 : {1.0, 0.0}) {
        for (const auto& p : simplex_centroid(3, 0.01)) {
          data.rows.push_back({0.0, p.proportions, {z1, z2}});
        }
      }
    }
  }
  return data;
}

Eigen::VectorXd random_beta(Rng& rng, Eigen::Index p) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd beta(p);
  for (Eigen::Index i = 0; i < p; ++i) beta(i) = normal(rng);
  return beta;
}

// Balanced mean-AUC reference estimates with SEs as a diagonal covariance.
MixtureModelFit reference_mean_fit() {
  MixtureModelFit fit;
  fit.m = 3;
  fit.h = 2;
  fit.labels = model_column_labels(3, 2);
  fit.coefficients.resize(13);
  fit.coefficients << 0.4400, 0.5455, 0.8599, 0.5989, 0.6472, 0.5512, 0.2532, 0.1660, -0.0148,
      0.0241, 0.0744, -0.1186, -0.0414;
  Eigen::VectorXd se(13);
  se << 0.0173, 0.0173, 0.0173, 0.0513, 0.0513, 0.0513, 0.0195, 0.0195, 0.0195, 0.0195, 0.0195,
      0.0195, 0.0160;
  fit.covariance = se.array().square().matrix().asDiagonal();
  fit.df = 71;
  fit.n = 84;
  return fit;
}

TEST(ModelMatrixTest, ColumnLabels) {
  EXPECT_EQ(model_column_labels(3, 2),
            (std::vector<std::string>{"x1", "x2", "x3", "x1x2", "x1x3", "x2x3", "x1z1", "x2z1",
                                      "x3z1", "x1z2", "x2z2", "x3z2", "z1z2"}));
  EXPECT_EQ(model_column_count(3, 2), 13U);
  EXPECT_EQ(model_column_count(4, 3), 4U + 6U + 12U + 3U);
  EXPECT_EQ(model_column_count(2, 0), 3U);
}

TEST(ModelMatrixTest, Rows) {
  const std::vector<double> centroid{kThird, kThird, kThird};
  const std::vector<double> z11{1, 1};
  const Eigen::RowVectorXd a = model_row(centroid, z11);
  Eigen::RowVectorXd want(13);
  want << kThird, kThird, kThird, 1.0 / 9, 1.0 / 9, 1.0 / 9, kThird, kThird, kThird, kThird,
      kThird, kThird, 1.0;
  EXPECT_LE((a - want).cwiseAbs().maxCoeff(), 1e-15);

  const std::vector<double> x{0.01, 0.01, 0.98};
  const std::vector<double> z10{1, 0};
  const Eigen::RowVectorXd b = model_row(x, z10);
  EXPECT_NEAR(b(3), 0.0001, 1e-15);
  EXPECT_NEAR(b(4), 0.0098, 1e-15);
  EXPECT_NEAR(b(5), 0.0098, 1e-15);
  EXPECT_EQ(b(9), 0.0);
  EXPECT_EQ(b(10), 0.0);
  EXPECT_EQ(b(11), 0.0);
  EXPECT_EQ(b(12), 0.0);
}

TEST(ModelMatrixTest, IdentifiabilityIdentities) {
  const ModelMatrix mm = build_design_matrix(reference_design());
  for (Eigen::Index i = 0; i < mm.values.rows(); ++i) {
    const auto& row = mm.values.row(i);
    const double x1 = row(0), x2 = row(1), x3 = row(2);
    EXPECT_NEAR(x1 * x1, x1 - row(3) - row(4), 1e-10);
    EXPECT_NEAR(x2 * x2, x2 - row(3) - row(5), 1e-10);
    EXPECT_NEAR(x3 * x3, x3 - row(4) - row(5), 1e-10);
  }
  const AnalysisDataset data = reference_design();
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto row = mm.values.row(static_cast<Eigen::Index>(i));
    EXPECT_NEAR(data.rows[i].z[0], row(6) + row(7) + row(8), 1e-10);
    EXPECT_NEAR(data.rows[i].z[1], row(9) + row(10) + row(11), 1e-10);
  }
}

TEST(FitOls, InterpolatesSquareSystem) {
  Rng rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelMatrix mm;
  mm.m = 3;
  mm.h = 2;
  mm.labels = model_column_labels(3, 2);
  mm.values.resize(13, 13);
  for (Eigen::Index i = 0; i < 13; ++i) {
    std::vector<double> x{u(rng), u(rng), u(rng)};
    const double s = x[0] + x[1] + x[2];
    for (double& v : x) v /= s;
    const std::vector<double> z{u(rng), u(rng)};
    mm.values.row(i) = model_row(x, z);
  }
  const Eigen::VectorXd y = random_beta(rng, 13);
  EXPECT_THROW(fit_ols(mm, y), NumericalError);
  FitOptions options;
  options.allow_zero_df = true;
  const MixtureModelFit fit = fit_ols(mm, y, options);
  EXPECT_EQ(fit.df, 0);
  EXPECT_LE((y - mm.values * fit.coefficients).norm(), 1e-10);
}

TEST(FitOls, NoiselessRecovery) {
  Rng rng(22);
  const ModelMatrix mm = build_design_matrix(reference_design());
  ASSERT_EQ(mm.values.rows(), 84);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd beta = random_beta(rng, 13);
    const MixtureModelFit fit = fit_ols(mm, mm.values * beta);
    EXPECT_LE((fit.coefficients - beta).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_EQ(fit.df, 71);
  }
}

TEST(FitOls, ResidualsOrthogonalToColumns) {
  Rng rng(23);
  std::normal_distribution<double> noise(0.0, 0.3);
  const ModelMatrix mm = build_design_matrix(reference_design());
  Eigen::VectorXd y = mm.values * random_beta(rng, 13);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise(rng);
  const MixtureModelFit fit = fit_ols(mm, y);
  const Eigen::VectorXd resid = y - mm.values * fit.coefficients;
  EXPECT_LE((mm.values.transpose() * resid).cwiseAbs().maxCoeff(), 1e-8 * y.norm());
  EXPECT_NEAR(fit.sigma2, resid.squaredNorm() / 71.0, 1e-14);
  // Covariance matches sigma2 (M'M)^-1 computed independently.
  const Eigen::MatrixXd xtx_inv =
      (mm.values.transpose() * mm.values).ldlt().solve(Eigen::MatrixXd::Identity(13, 13));
  EXPECT_LE((fit.covariance - fit.sigma2 * xtx_inv).cwiseAbs().maxCoeff(),
            1e-8 * fit.covariance.cwiseAbs().maxCoeff());
  EXPECT_LE((fit.covariance - fit.covariance.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FitOls, ConfidenceIntervalCoverage) {
  Rng rng(24);
  std::normal_distribution<double> noise(0.0, 0.05);
  const ModelMatrix mm = build_design_matrix(reference_design());
  const Eigen::VectorXd beta = random_beta(rng, 13);
  const Eigen::VectorXd mean = mm.values * beta;
  // Two-sided 95% critical value at df 71, found by bisection on the CDF.
  double lo = 1.0, hi = 3.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, 71) < 0.975 ? lo : hi) = mid;
  }
  const double crit = 0.5 * (lo + hi);
  std::vector<int> covered(13, 0);
  const int reps = 500;
  for (int r = 0; r < reps; ++r) {
    Eigen::VectorXd y = mean;
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise(rng);
    const MixtureModelFit fit = fit_ols(mm, y);
    for (Eigen::Index c = 0; c < 13; ++c) {
      const double se = std::sqrt(fit.covariance(c, c));
      if (std::abs(fit.coefficients(c) - beta(c)) <= crit * se) ++covered[static_cast<std::size_t>(c)];
    }
  }
  for (std::size_t c = 0; c < 13; ++c) {
    const double rate = covered[c] / static_cast<double>(reps);
    EXPECT_GE(rate, 0.90) << mm.labels[c];
    EXPECT_LE(rate, 0.99) << mm.labels[c];
  }
}

TEST(FitOls, RankDeficiencyNamesColumns) {
  // Only the three pure-dominant points: the blend columns cannot be separated.
  AnalysisDataset data = reference_design(1);
  std::erase_if(data.rows, [](const Observation& o) {
    return *std::max_element(o.x.begin(), o.x.end()) < 0.9;
  });
  for (int copy = 0; copy < 3; ++copy) {
    const auto rows = data.rows;
    data.rows.insert(data.rows.end(), rows.begin(), rows.end());
  }
  const ModelMatrix mm = build_design_matrix(data);
  ASSERT_GT(mm.values.rows(), 13);
  try {
    fit_ols(mm, Eigen::VectorXd::Ones(mm.values.rows()));
    FAIL() << "expected RankDeficientError";
  } catch (const RankDeficientError& e) {
    EXPECT_FALSE(e.dependent_columns().empty());
    for (const auto& label : e.dependent_columns()) {
      EXPECT_NE(std::find(mm.labels.begin(), mm.labels.end(), label), mm.labels.end());
    }
  }
}

TEST(Inference, ReferenceTermExamples) {
  const MixtureModelFit fit = reference_mean_fit();
  const auto terms = term_inference(fit);
  ASSERT_EQ(terms.size(), 13U);
  // Printed t values come from unrounded estimates, so allow for the
  // rounding of the four-decimal inputs.
  EXPECT_NEAR(terms[0].t, 25.43, 0.01);
  EXPECT_LT(terms[0].p, 0.001);
  EXPECT_NEAR(terms[8].t, -0.758, 0.006);
  EXPECT_NEAR(terms[8].p, 0.451, 0.005);
  EXPECT_NEAR(terms[9].t, 1.233, 0.006);
  EXPECT_NEAR(terms[9].p, 0.222, 0.005);
  for (const auto& t : terms) {
    EXPECT_EQ(t.t, t.estimate / t.se);
    EXPECT_GT(t.p, 0.0);
    EXPECT_LE(t.p, 1.0);
  }
}

TEST(Inference, ZeroStandardErrorIsDegenerate) {
  MixtureModelFit fit = reference_mean_fit();
  fit.covariance(2, 2) = 0.0;
  const auto terms = term_inference(fit);
  EXPECT_TRUE(terms[2].degenerate);
  EXPECT_TRUE(std::isnan(terms[2].p));
  EXPECT_FALSE(terms[1].degenerate);
}

TEST(ImpliedEffect, AveragesInteractionCoefficients) {
  const MixtureModelFit fit = reference_mean_fit();
  EXPECT_NEAR(implied_covariate_effect(fit, 0).estimate, 0.1348, 5e-5);
  EXPECT_NEAR(implied_covariate_effect(fit, 1).estimate, -0.0067, 5e-5);
  EXPECT_EQ(implied_covariate_effect(fit, 0).label, "z1");

  MixtureModelFit logsd = fit;
  logsd.coefficients.segment(9, 3) << -1.727, -1.721, -1.850;
  EXPECT_NEAR(implied_covariate_effect(logsd, 1).estimate, -1.766, 5e-4);

  MixtureModelFit flat = fit;
  flat.coefficients.segment(6, 3).setConstant(0.37);
  EXPECT_NEAR(implied_covariate_effect(flat, 0).estimate, 0.37, 1e-15);
  EXPECT_THROW(implied_covariate_effect(fit, 2), InvalidArgument);
}

TEST(ImpliedEffect, StandardErrorFromDesignCovariance) {
  // sigma chosen so the x1 SE is the printed 0.0173.
  const ModelMatrix mm = build_design_matrix(reference_design());
  const Eigen::MatrixXd xtx_inv =
      (mm.values.transpose() * mm.values).ldlt().solve(Eigen::MatrixXd::Identity(13, 13));
  MixtureModelFit fit = reference_mean_fit();
  const double sigma2 = 0.0173 * 0.0173 / xtx_inv(0, 0);
  fit.covariance = sigma2 * xtx_inv;
  const ImpliedEffect e = implied_covariate_effect(fit, 0);
  EXPECT_NEAR(e.se, 0.0113, 5e-5);
  // The x1 SE is itself rounded, which carries into the scaled entries.
  EXPECT_NEAR(std::sqrt(fit.covariance(3, 3)), 0.0513, 2e-4);
  EXPECT_NEAR(std::sqrt(fit.covariance(6, 6)), 0.0195, 1e-4);
  EXPECT_NEAR(std::sqrt(fit.covariance(12, 12)), 0.0160, 1e-4);
}

TEST(Predict, ReferenceCentroid) {
  const MixtureModelFit fit = reference_mean_fit();
  const MixturePoint centroid{{kThird, kThird, kThird}};
  const std::vector<double> z00{0, 0};
  const double want = (0.4400 + 0.5455 + 0.8599) / 3 + (0.5989 + 0.6472 + 0.5512) / 9;
  EXPECT_NEAR(predict(fit, centroid, z00), want, 1e-12);
  EXPECT_NEAR(predict(fit, centroid, z00), 0.81483, 5e-6);
  EXPECT_THROW(predict(fit, MixturePoint{{0.5, 0.6, 0.1}}, z00), InvalidArgument);
}

TEST(Predict, ReproducesFittedValues) {
  Rng rng(25);
  std::normal_distribution<double> noise(0.0, 0.1);
  AnalysisDataset data = reference_design();
  for (auto& row : data.rows) row.y = 0.8 + noise(rng);
  const ModelMatrix mm = build_design_matrix(data);
  const MixtureModelFit fit = fit_ols(mm, response_vector(data));
  const Eigen::VectorXd fitted = mm.values * fit.coefficients;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    EXPECT_NEAR(predict(fit, MixturePoint{data.rows[i].x}, data.rows[i].z),
                fitted(static_cast<Eigen::Index>(i)), 1e-14);
  }
}

TEST(Dataset, RejectsMixedScenarios) {
  RunOutcome a;
  a.scenario = TestScenario::kBalanced;
  a.train_mixture = MixturePoint{{0.5, 0.5}};
  a.aucs = {0.8, 0.9};
  a.mean_auc = 0.85;
  RunOutcome b = a;
  b.scenario = TestScenario::kReverse;
  const std::vector<RunOutcome> mixed{a, b};
  EXPECT_THROW(analysis_dataset(mixed, 2, 0, Response::kMeanAuc), InvalidArgument);
  const std::vector<RunOutcome> single{a, a};
  const auto data = analysis_dataset(single, 2, 0, Response::kMeanAuc);
  EXPECT_EQ(data.scenario, "balanced");
  EXPECT_EQ(data.rows[1].y, 0.85);
}

TEST(FitReport, JsonRoundTrip) {
  Rng rng(26);
  std::normal_distribution<double> noise(0.0, 0.1);
  AnalysisDataset data = reference_design();
  for (auto& row : data.rows) row.y = noise(rng);
  const MixtureModelFit fit = fit_ols(build_design_matrix(data), response_vector(data));
  const nlohmann::json report = fit_report_json(fit, "balanced", "mean_auc");
  EXPECT_EQ(report.at("terms").size(), 13U);
  EXPECT_EQ(report.at("implied_effects").size(), 2U);
  EXPECT_EQ(report.at("df").get<int>(), 71);
  const MixtureModelFit back = fit_from_report_json(nlohmann::json::parse(report.dump()));
  EXPECT_EQ(back.coefficients, fit.coefficients);
  EXPECT_EQ(back.covariance, fit.covariance);
  EXPECT_EQ(back.sigma2, fit.sigma2);
  EXPECT_EQ(back.labels, fit.labels);
}

}  // namespace
}  // namespace mixrobust
