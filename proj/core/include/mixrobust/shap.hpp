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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mixrobust/mixmodel.hpp"

namespace mixrobust {

struct ShapReport {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;            // n x p per-observation Shapley values
  Eigen::VectorXd importance;        // mean |phi| per column
  Eigen::VectorXd background_means;  // column means standing in for E(x)
};

// phi_ic = beta_c * (M_ic - mean_c), each model column treated as one feature.
Eigen::MatrixXd shap_per_observation(const MixtureModelFit& fit, const ModelMatrix& model);

// Mean absolute value of each column.
Eigen::VectorXd shap_importance(const Eigen::MatrixXd& phi);

ShapReport shap_report(const MixtureModelFit& fit, const ModelMatrix& model);

inline constexpr std::size_t kMaxOracleFeatures = 20;

// Shapley values of a linear model by enumerating every coalition:
// phi_k = sum over M in S\{k} of w_M [v(M + k) - v(M)], with
// v(M) = sum_{j in M} beta_j x_j + sum_{j not in M} beta_j mean_j and
// w_M = 1 / (p * C(p - 1, |M|)). Exponential in p; rejects p > 20.
std::vector<double> exact_shapley_oracle(std::span<const double> betas,
                                         std::span<const double> row,
                                         std::span<const double> means);

// {"scenario", "response", "terms": [{label, importance}] sorted by importance
// descending, "background_means": {label: mean}}.
nlohmann::json shap_report_json(const ShapReport& report, std::string_view scenario,
                                std::string_view response);
// Per-observation matrix with one column per model term.
void write_shap_values_csv(std::ostream& out, const ShapReport& report);

}  // namespace mixrobust
