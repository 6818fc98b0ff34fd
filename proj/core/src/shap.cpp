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
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>

#include "mixrobust/csv.hpp"
#include "mixrobust/error.hpp"

namespace mixrobust {

Eigen::MatrixXd shap_per_observation(const MixtureModelFit& fit, const ModelMatrix& model) {
  if (fit.labels != model.labels) throw InvalidArgument("fit and model matrix columns differ");
  if (model.values.rows() == 0) throw InvalidArgument("SHAP needs at least one observation");
  const Eigen::RowVectorXd means = model.values.colwise().mean();
  return (model.values.rowwise() - means).array().rowwise() *
         fit.coefficients.transpose().array();
}

Eigen::VectorXd shap_importance(const Eigen::MatrixXd& phi) {
  if (phi.rows() == 0) throw InvalidArgument("SHAP importance of an empty matrix");
  return phi.cwiseAbs().colwise().mean().transpose();
}

ShapReport shap_report(const MixtureModelFit& fit, const ModelMatrix& model) {
  ShapReport report;
  report.labels = fit.labels;
  report.values = shap_per_observation(fit, model);
  report.importance = shap_importance(report.values);
  report.background_means = model.values.colwise().mean().transpose();
  return report;
}

std::vector<double> exact_shapley_oracle(std::span<const double> betas,
                                         std::span<const double> row,
                                         std::span<const double> means) {
  const std::size_t p = betas.size();
  if (row.size() != p || means.size() != p) {
    throw InvalidArgument("oracle needs betas, row and means of equal length");
  }
  if (p == 0) return {};
  if (p > kMaxOracleFeatures) {
    throw InvalidArgument("exact Shapley enumeration is limited to 20 features");
  }

  // w[q] = 1 / (p * C(p-1, q)).
  std::vector<double> weight(p);
  double binom = 1.0;
  for (std::size_t q = 0; q < p; ++q) {
    weight[q] = 1.0 / (static_cast<double>(p) * binom);
    binom = binom * static_cast<double>(p - 1 - q) / static_cast<double>(q + 1);
  }

  auto value = [&](std::uint32_t coalition) {
    double v = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      v += betas[j] * (((coalition >> j) & 1U) != 0U ? row[j] : means[j]);
    }
    return v;
  };

  std::vector<double> phi(p, 0.0);
  const std::uint32_t full = (1U << p) - 1U;
  for (std::size_t k = 0; k < p; ++k) {
    const std::uint32_t bit = 1U << k;
    double total = 0.0;
    for (std::uint32_t coalition = 0; coalition <= full; ++coalition) {
      if ((coalition & bit) != 0U) continue;
      const auto size = static_cast<std::size_t>(std::popcount(coalition));
      total += weight[size] * (value(coalition | bit) - value(coalition));
      if (coalition == full) break;
    }
    phi[k] = total;
  }
  return phi;
}

nlohmann::json shap_report_json(const ShapReport& report, std::string_view scenario,
                                std::string_view response) {
  std::vector<std::size_t> order(report.labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.importance(static_cast<Eigen::Index>(a)) >
           report.importance(static_cast<Eigen::Index>(b));
  });
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t c : order) {
    terms.push_back({{"label", report.labels[c]},
                     {"importance", report.importance(static_cast<Eigen::Index>(c))}});
  }
  nlohmann::json means = nlohmann::json::object();
  for (std::size_t c = 0; c < report.labels.size(); ++c) {
    means[report.labels[c]] = report.background_means(static_cast<Eigen::Index>(c));
  }
  return {{"scenario", scenario},
          {"response", response},
          {"n", report.values.rows()},
          {"terms", std::move(terms)},
          {"background_means", std::move(means)}};
}

void write_shap_values_csv(std::ostream& out, const ShapReport& report) {
  out << "row";
  for (const auto& label : report.labels) out << ",phi_" << label;
  out << '\n';
  for (Eigen::Index i = 0; i < report.values.rows(); ++i) {
    out << (i + 1);
    for (Eigen::Index c = 0; c < report.values.cols(); ++c) out << ',' << csv::exact(report.values(i, c));
    out << '\n';
  }
}

}  // namespace mixrobust
