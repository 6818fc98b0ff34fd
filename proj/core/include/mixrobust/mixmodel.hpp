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
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mixrobust/design.hpp"
#include "mixrobust/metrics.hpp"

namespace mixrobust {

// Responses analyzed per scenario.
enum class Response { kMeanAuc, kLogSd };
std::string_view to_string(Response response);
Response parse_response(std::string_view name);

struct Observation {
  double y = 0.0;
  std::vector<double> x;  // m proportions summing to 1
  std::vector<double> z;  // h covariate levels
};

struct AnalysisDataset {
  std::size_t m = 0;
  std::size_t h = 0;
  std::string scenario;
  std::string response;
  std::vector<Observation> rows;

  // Throws InvalidArgument on shape errors or rows whose x does not sum to 1
  // within 1e-6.
  void validate() const;
};

// Dataset for one response from single-scenario outcomes. Throws
// InvalidArgument when the outcomes mix scenarios.
AnalysisDataset analysis_dataset(std::span<const RunOutcome> outcomes, std::size_t m,
                                 std::size_t h, Response response);

// Column order: x_j (m), x_j x_j' for j < j', z_k x_j (k outer, j inner),
// z_k z_k' for k < k'. No intercept, no x_j^2, no main-effect z_k.
std::vector<std::string> model_column_labels(std::size_t m, std::size_t h);
std::size_t model_column_count(std::size_t m, std::size_t h);

Eigen::RowVectorXd model_row(std::span<const double> x, std::span<const double> z);

struct ModelMatrix {
  std::size_t m = 0;
  std::size_t h = 0;
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
};

ModelMatrix build_design_matrix(const AnalysisDataset& data);

struct FitOptions {
  double rank_tolerance = 1e-10;  // relative to the largest singular value
  bool allow_zero_df = false;     // permit n == p (no inference)
};

struct MixtureModelFit {
  std::size_t m = 0;
  std::size_t h = 0;
  std::vector<std::string> labels;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;  // sigma2 * (M'M)^-1; NaN when df == 0
  double sigma2 = 0.0;
  int df = 0;
  std::size_t n = 0;

  std::size_t column(std::string_view label) const;
};

// Least squares through Householder QR of the model matrix. Rejects n < p and
// matrices whose smallest singular value is below rank_tolerance times the
// largest, naming the columns involved in the near-dependence.
MixtureModelFit fit_ols(const ModelMatrix& model, const Eigen::VectorXd& y,
                        const FitOptions& options = {});
Eigen::VectorXd response_vector(const AnalysisDataset& data);

struct TermInference {
  std::string label;
  double estimate = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 0.0;
  bool degenerate = false;  // zero SE: t and p undefined (NaN)
};

// Estimate, standard error, t and two-sided Student-t p on fit.df.
std::vector<TermInference> term_inference(const MixtureModelFit& fit);

// Inference for a linear contrast c of the coefficients.
TermInference contrast_inference(const MixtureModelFit& fit, const Eigen::VectorXd& contrast,
                                 std::string label);

struct ImpliedEffect {
  std::size_t covariate = 0;  // 0-based k
  std::string label;          // "z{k+1}"
  double estimate = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 0.0;
  bool degenerate = false;
};

// Main effect of covariate k under the sum-to-zero constraint: the average of
// its interaction coefficients with the m proportions.
ImpliedEffect implied_covariate_effect(const MixtureModelFit& fit, std::size_t k);

double predict(const MixtureModelFit& fit, const MixturePoint& x, std::span<const double> z);

// Fit report JSON: terms [{label, estimate, se, t, p}], implied_effects,
// sigma2, df, n, scenario, response; plus m, h and the covariance matrix so a
// fit can be reloaded.
nlohmann::json fit_report_json(const MixtureModelFit& fit, std::string_view scenario,
                               std::string_view response);
MixtureModelFit fit_from_report_json(const nlohmann::json& report);

}  // namespace mixrobust
