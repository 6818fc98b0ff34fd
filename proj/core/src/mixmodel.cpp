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

#include <cmath>
#include <limits>

#include "mixrobust/error.hpp"
#include "mixrobust/student_t.hpp"

namespace mixrobust {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double json_number(const nlohmann::json& v) {
  return v.is_null() ? kNaN : v.get<double>();
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string_view to_string(Response response) {
  return response == Response::kMeanAuc ? "mean_auc" : "log_sd";
}

Response parse_response(std::string_view name) {
  if (name == "mean_auc") return Response::kMeanAuc;
  if (name == "log_sd") return Response::kLogSd;
  throw InvalidArgument("unknown response '" + std::string(name) + "'");
}

void AnalysisDataset::validate() const {
  if (m < 2) throw InvalidArgument("analysis needs m >= 2");
  for (const auto& row : rows) {
    if (row.x.size() != m || row.z.size() != h) {
      throw InvalidArgument("analysis row does not match m/h");
    }
    double sum = 0.0;
    for (double v : row.x) sum += v;
    if (std::abs(sum - 1.0) > 1e-6) throw InvalidArgument("mixture row does not sum to 1");
  }
}

AnalysisDataset analysis_dataset(std::span<const RunOutcome> outcomes, std::size_t m,
                                 std::size_t h, Response response) {
  AnalysisDataset data;
  data.m = m;
  data.h = h;
  data.response = std::string(to_string(response));
  for (const auto& o : outcomes) {
    const std::string scenario(to_string(o.scenario));
    if (data.rows.empty()) {
      data.scenario = scenario;
    } else if (scenario != data.scenario) {
      throw InvalidArgument("outcomes mix scenarios '" + data.scenario + "' and '" + scenario +
                            "'; analyze each scenario separately");
    }
    data.rows.push_back(Observation{response == Response::kMeanAuc ? o.mean_auc : o.log_sd,
                                    o.train_mixture.proportions, o.covariates});
  }
  data.validate();
  return data;
}

std::size_t model_column_count(std::size_t m, std::size_t h) {
  return m + m * (m - 1) / 2 + h * m + h * (h - 1) / 2;
}

std::vector<std::string> model_column_labels(std::size_t m, std::size_t h) {
  std::vector<std::string> labels;
  labels.reserve(model_column_count(m, h));
  for (std::size_t j = 1; j <= m; ++j) labels.push_back("x" + std::to_string(j));
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t jj = j + 1; jj <= m; ++jj) {
      labels.push_back("x" + std::to_string(j) + "x" + std::to_string(jj));
    }
  }
  for (std::size_t k = 1; k <= h; ++k) {
    for (std::size_t j = 1; j <= m; ++j) {
      labels.push_back("x" + std::to_string(j) + "z" + std::to_string(k));
    }
  }
  for (std::size_t k = 1; k <= h; ++k) {
    for (std::size_t kk = k + 1; kk <= h; ++kk) {
      labels.push_back("z" + std::to_string(k) + "z" + std::to_string(kk));
    }
  }
  return labels;
}

Eigen::RowVectorXd model_row(std::span<const double> x, std::span<const double> z) {
  const std::size_t m = x.size();
  const std::size_t h = z.size();
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(model_column_count(m, h)));
  Eigen::Index c = 0;
  for (std::size_t j = 0; j < m; ++j) row(c++) = x[j];
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t jj = j + 1; jj < m; ++jj) row(c++) = x[j] * x[jj];
  }
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t j = 0; j < m; ++j) row(c++) = z[k] * x[j];
  }
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t kk = k + 1; kk < h; ++kk) row(c++) = z[k] * z[kk];
  }
  return row;
}

ModelMatrix build_design_matrix(const AnalysisDataset& data) {
  data.validate();
  ModelMatrix model;
  model.m = data.m;
  model.h = data.h;
  model.labels = model_column_labels(data.m, data.h);
  model.values.resize(static_cast<Eigen::Index>(data.rows.size()),
                      static_cast<Eigen::Index>(model.labels.size()));
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    model.values.row(static_cast<Eigen::Index>(i)) = model_row(data.rows[i].x, data.rows[i].z);
  }
  return model;
}

Eigen::VectorXd response_vector(const AnalysisDataset& data) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.rows.size()));
  for (std::size_t i = 0; i < data.rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = data.rows[i].y;
  return y;
}

std::size_t MixtureModelFit::column(std::string_view label) const {
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (labels[c] == label) return c;
  }
  throw InvalidArgument("fit has no column '" + std::string(label) + "'");
}

MixtureModelFit fit_ols(const ModelMatrix& model, const Eigen::VectorXd& y,
                        const FitOptions& options) {
  const Eigen::MatrixXd& x = model.values;
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (y.size() != n) throw InvalidArgument("response length differs from model rows");
  if (static_cast<std::size_t>(p) != model.labels.size()) {
    throw InvalidArgument("model labels do not match its columns");
  }
  if (n < p || (n == p && !options.allow_zero_df)) {
    throw NumericalError("need more observations (" + std::to_string(n) + ") than model terms (" +
                         std::to_string(p) + ")");
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (p == 0 || sv(0) == 0.0 || sv(p - 1) <= options.rank_tolerance * sv(0)) {
    // Columns carrying weight in the near-null right singular vectors.
    std::vector<std::string> dependent;
    std::vector<bool> involved(static_cast<std::size_t>(p), false);
    for (Eigen::Index s = 0; s < p; ++s) {
      if (sv(s) > options.rank_tolerance * sv(0) && sv(0) != 0.0) continue;
      for (Eigen::Index c = 0; c < p; ++c) {
        if (std::abs(svd.matrixV()(c, s)) > 1e-6) involved[static_cast<std::size_t>(c)] = true;
      }
    }
    std::string names;
    for (Eigen::Index c = 0; c < p; ++c) {
      if (!involved[static_cast<std::size_t>(c)]) continue;
      dependent.push_back(model.labels[static_cast<std::size_t>(c)]);
      names += (names.empty() ? "" : ", ") + dependent.back();
    }
    throw RankDeficientError(dependent, "model matrix is rank deficient; dependent columns: " + names);
  }

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const Eigen::VectorXd qty = (qr.householderQ().transpose() * y).head(p);

  MixtureModelFit fit;
  fit.m = model.m;
  fit.h = model.h;
  fit.labels = model.labels;
  fit.n = static_cast<std::size_t>(n);
  fit.df = static_cast<int>(n - p);
  fit.coefficients = r.triangularView<Eigen::Upper>().solve(qty);

  const Eigen::VectorXd residual = y - x * fit.coefficients;
  if (fit.df > 0) {
    fit.sigma2 = residual.squaredNorm() / fit.df;
    // (M'M)^-1 = R^-1 R^-T.
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    fit.covariance = fit.sigma2 * (r_inv * r_inv.transpose());
    fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose()).eval();
  } else {
    fit.sigma2 = kNaN;
    fit.covariance = Eigen::MatrixXd::Constant(p, p, kNaN);
  }
  return fit;
}

TermInference contrast_inference(const MixtureModelFit& fit, const Eigen::VectorXd& contrast,
                                 std::string label) {
  if (contrast.size() != fit.coefficients.size()) {
    throw InvalidArgument("contrast length differs from the coefficient count");
  }
  TermInference out;
  out.label = std::move(label);
  out.estimate = contrast.dot(fit.coefficients);
  const double var = contrast.dot(fit.covariance * contrast);
  out.se = std::sqrt(std::max(var, 0.0));
  if (fit.df < 1 || !(out.se > 0.0) || !std::isfinite(out.se)) {
    out.degenerate = true;
    out.t = kNaN;
    out.p = kNaN;
    return out;
  }
  out.t = out.estimate / out.se;
  out.p = student_t_two_sided_p(out.t, fit.df);
  return out;
}

std::vector<TermInference> term_inference(const MixtureModelFit& fit) {
  if (fit.df < 1) throw NumericalError("term inference needs at least one residual df");
  std::vector<TermInference> terms;
  const Eigen::Index p = fit.coefficients.size();
  for (Eigen::Index c = 0; c < p; ++c) {
    terms.push_back(contrast_inference(fit, Eigen::VectorXd::Unit(p, c),
                                       fit.labels[static_cast<std::size_t>(c)]));
  }
  return terms;
}

ImpliedEffect implied_covariate_effect(const MixtureModelFit& fit, std::size_t k) {
  if (k >= fit.h) throw InvalidArgument("covariate index out of range");
  Eigen::VectorXd contrast = Eigen::VectorXd::Zero(fit.coefficients.size());
  const double weight = 1.0 / static_cast<double>(fit.m);
  for (std::size_t j = 1; j <= fit.m; ++j) {
    contrast(static_cast<Eigen::Index>(
        fit.column("x" + std::to_string(j) + "z" + std::to_string(k + 1)))) = weight;
  }
  const TermInference t = contrast_inference(fit, contrast, "z" + std::to_string(k + 1));
  return ImpliedEffect{k, t.label, t.estimate, t.se, t.t, t.p, t.degenerate};
}

double predict(const MixtureModelFit& fit, const MixturePoint& x, std::span<const double> z) {
  if (x.size() != fit.m || z.size() != fit.h) {
    throw InvalidArgument("prediction point does not match the fit's m/h");
  }
  if (std::abs(x.sum() - 1.0) > 1e-6) throw InvalidArgument("prediction mixture must sum to 1");
  return model_row(x.proportions, z).dot(fit.coefficients);
}

nlohmann::json fit_report_json(const MixtureModelFit& fit, std::string_view scenario,
                               std::string_view response) {
  nlohmann::json report;
  report["scenario"] = scenario;
  report["response"] = response;
  report["n"] = fit.n;
  report["df"] = fit.df;
  report["m"] = fit.m;
  report["h"] = fit.h;
  report["sigma2"] = number_or_null(fit.sigma2);
  nlohmann::json terms = nlohmann::json::array();
  if (fit.df >= 1) {
    for (const auto& t : term_inference(fit)) {
      terms.push_back({{"label", t.label},
                       {"estimate", t.estimate},
                       {"se", t.se},
                       {"t", number_or_null(t.t)},
                       {"p", number_or_null(t.p)}});
    }
  }
  report["terms"] = std::move(terms);
  nlohmann::json implied = nlohmann::json::array();
  if (fit.df >= 1) {
    for (std::size_t k = 0; k < fit.h; ++k) {
      const auto e = implied_covariate_effect(fit, k);
      implied.push_back({{"label", e.label},
                         {"estimate", e.estimate},
                         {"se", e.se},
                         {"t", number_or_null(e.t)},
                         {"p", number_or_null(e.p)}});
    }
  }
  report["implied_effects"] = std::move(implied);
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index i = 0; i < fit.covariance.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < fit.covariance.cols(); ++j) row.push_back(number_or_null(fit.covariance(i, j)));
    cov.push_back(std::move(row));
  }
  report["covariance"] = std::move(cov);
  report["labels"] = fit.labels;
  nlohmann::json coefficients = nlohmann::json::array();
  for (Eigen::Index c = 0; c < fit.coefficients.size(); ++c) coefficients.push_back(fit.coefficients(c));
  report["coefficients"] = std::move(coefficients);
  return report;
}

MixtureModelFit fit_from_report_json(const nlohmann::json& report) {
  try {
    MixtureModelFit fit;
    fit.m = report.at("m").get<std::size_t>();
    fit.h = report.at("h").get<std::size_t>();
    fit.n = report.at("n").get<std::size_t>();
    fit.df = report.at("df").get<int>();
    fit.sigma2 = json_number(report.at("sigma2"));
    fit.labels = report.at("labels").get<std::vector<std::string>>();
    if (fit.labels != model_column_labels(fit.m, fit.h)) {
      throw IoError("fit report labels do not match m/h");
    }
    const auto p = static_cast<Eigen::Index>(fit.labels.size());
    const auto& coefficients = report.at("coefficients");
    const auto& cov = report.at("covariance");
    if (static_cast<Eigen::Index>(coefficients.size()) != p ||
        static_cast<Eigen::Index>(cov.size()) != p) {
      throw IoError("fit report has inconsistent sizes");
    }
    fit.coefficients.resize(p);
    fit.covariance.resize(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
      fit.coefficients(i) = coefficients.at(static_cast<std::size_t>(i)).get<double>();
      const auto& row = cov.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != p) throw IoError("fit report covariance not square");
      for (Eigen::Index j = 0; j < p; ++j) fit.covariance(i, j) = json_number(row.at(static_cast<std::size_t>(j)));
    }
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed fit report: ") + e.what());
  }
}

}  // namespace mixrobust
