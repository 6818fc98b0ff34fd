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
#include "mixrobust/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixrobust/error.hpp"

namespace mixrobust {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

Eigen::MatrixXd one_hot(std::span<const int> labels, std::size_t num_classes) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()),
                                            static_cast<Eigen::Index>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y(static_cast<Eigen::Index>(i), labels[i] - 1) = 1.0;
  }
  return y;
}

void check_training_labels(std::span<const int> labels, std::size_t num_classes,
                           Eigen::Index rows) {
  if (static_cast<Eigen::Index>(labels.size()) != rows) {
    throw InvalidArgument("feature rows and labels differ in length");
  }
  std::vector<bool> seen(num_classes, false);
  for (int label : labels) {
    if (label < 1 || static_cast<std::size_t>(label) > num_classes) {
      throw InvalidArgument("training label out of range");
    }
    seen[static_cast<std::size_t>(label - 1)] = true;
  }
  if (std::count(seen.begin(), seen.end(), true) < 2) {
    throw InvalidArgument("training data must cover at least two classes");
  }
}

Eigen::MatrixXd standardized_with_bias(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& center,
                                       const Eigen::RowVectorXd& scale) {
  Eigen::MatrixXd out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) =
      (x.rowwise() - center).array().rowwise() / scale.array();
  out.col(x.cols()).setOnes();
  return out;
}

double logistic_objective(const Eigen::MatrixXd& xb, const Eigen::MatrixXd& y,
                          const Eigen::MatrixXd& w, double l2) {
  const Eigen::MatrixXd z = xb * w;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      loss += softplus(z(i, j)) - y(i, j) * z(i, j);
    }
  }
  loss /= static_cast<double>(z.rows());
  const Eigen::Index d = w.rows() - 1;
  loss += 0.5 * l2 * w.topRows(d).squaredNorm();
  return loss;
}

}  // namespace

ScoreMatrix::ScoreMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}

void ScoreMatrix::validate(double tol) const {
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const double v = values_(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidArgument("score outside [0, 1] in row " + std::to_string(i + 1));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw InvalidArgument("score row " + std::to_string(i + 1) + " does not sum to 1");
    }
  }
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  std::vector<double> exps(static_cast<std::size_t>(logits.cols()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double peak = logits.row(i).maxCoeff();
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      out(i, j) = std::exp(logits(i, j) - peak);
      exps[static_cast<std::size_t>(j)] = out(i, j);
    }
    std::sort(exps.begin(), exps.end());
    const double total = std::accumulate(exps.begin(), exps.end(), 0.0);
    out.row(i) /= total;
  }
  return out;
}

std::string classifier_name(const ClassifierKind& kind) {
  return std::visit(Overloaded{[](const LogisticKind&) { return std::string("logistic"); },
                               [](const BoostedStumpsKind&) { return std::string("boosted_stumps"); },
                               [](const ExternalKind&) { return std::string("external"); }},
                    kind);
}

Hyperparameters resolved_hyperparameters(const ClassifierKind& kind,
                                         const Hyperparameters& overrides) {
  Hyperparameters out = std::visit(
      Overloaded{[](const LogisticKind&) {
                   const LogisticOptions d;
                   return Hyperparameters{{"epochs", d.epochs}, {"step", d.step}, {"l2", d.l2}};
                 },
                 [](const BoostedStumpsKind&) {
                   const StumpOptions d;
                   return Hyperparameters{{"rounds", d.rounds}, {"shrinkage", d.shrinkage}};
                 },
                 [](const ExternalKind&) { return Hyperparameters{}; }},
      kind);
  for (const auto& [name, value] : overrides) {
    if (!out.contains(name)) {
      throw InvalidArgument("unknown hyperparameter '" + name + "' for " + classifier_name(kind));
    }
    out[name] = value;
  }
  return out;
}

Eigen::MatrixXd gather_features(const DatasetPool& pool, std::span<const std::size_t> rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(pool.dim()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = pool.row(rows[r]);
    for (std::size_t f = 0; f < src.size(); ++f) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = src[f];
    }
  }
  return x;
}

std::vector<int> gather_labels(const DatasetPool& pool, std::span<const std::size_t> rows) {
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t i : rows) labels.push_back(pool.label(i));
  return labels;
}

LogisticModel fit_logistic(const Eigen::MatrixXd& features, std::span<const int> labels,
                           std::size_t num_classes, const LogisticOptions& options) {
  check_training_labels(labels, num_classes, features.rows());
  if (options.epochs < 0 || !(options.step > 0.0) || options.l2 < 0.0) {
    throw InvalidArgument("invalid logistic options");
  }
  const double n = static_cast<double>(features.rows());
  const Eigen::Index d = features.cols();

  LogisticModel model;
  model.center = features.colwise().mean();
  model.scale = ((features.rowwise() - model.center).array().square().colwise().sum() / n).sqrt();
  for (Eigen::Index f = 0; f < d; ++f) {
    if (!(model.scale(f) > 1e-12)) model.scale(f) = 1.0;
  }

  const Eigen::MatrixXd xb = standardized_with_bias(features, model.center, model.scale);
  const Eigen::MatrixXd y = one_hot(labels, num_classes);
  model.weights = Eigen::MatrixXd::Zero(d + 1, static_cast<Eigen::Index>(num_classes));

  model.loss_trace.reserve(static_cast<std::size_t>(options.epochs) + 1);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    model.loss_trace.push_back(logistic_objective(xb, y, model.weights, options.l2));
    Eigen::MatrixXd residual = (xb * model.weights).unaryExpr(&sigmoid) - y;
    Eigen::MatrixXd grad = xb.transpose() * residual / n;
    grad.topRows(d) += options.l2 * model.weights.topRows(d);
    model.weights -= options.step * grad;
  }
  model.loss_trace.push_back(logistic_objective(xb, y, model.weights, options.l2));
  return model;
}

Eigen::MatrixXd logistic_logits(const LogisticModel& model, const Eigen::MatrixXd& features) {
  return standardized_with_bias(features, model.center, model.scale) * model.weights;
}

Stump best_stump(const Eigen::MatrixXd& features, std::span<const double> residuals) {
  const Eigen::Index n = features.rows();
  if (n == 0 || static_cast<Eigen::Index>(residuals.size()) != n) {
    throw InvalidArgument("best_stump: residuals must match feature rows");
  }
  const double total = std::accumulate(residuals.begin(), residuals.end(), 0.0);
  const double mean = total / static_cast<double>(n);

  Stump best{0, std::numeric_limits<double>::infinity(), mean, mean};
  // Maximizing S_L^2/n_L + S_R^2/n_R is equivalent to minimizing SSE.
  double best_gain = total * total / static_cast<double>(n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index f = 0; f < features.cols(); ++f) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return features(a, f) < features(b, f);
    });
    double left_sum = 0.0;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      left_sum += residuals[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
      const double here = features(order[static_cast<std::size_t>(k)], f);
      const double next = features(order[static_cast<std::size_t>(k + 1)], f);
      if (!(next > here)) continue;
      const double n_left = static_cast<double>(k + 1);
      const double n_right = static_cast<double>(n - k - 1);
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / n_left + right_sum * right_sum / n_right;
      if (gain > best_gain + 1e-12 * std::max(1.0, std::abs(best_gain))) {
        best_gain = gain;
        best = Stump{f, 0.5 * (here + next), left_sum / n_left, right_sum / n_right};
      }
    }
  }
  return best;
}

StumpEnsemble fit_boosted_stumps(const Eigen::MatrixXd& features, std::span<const int> labels,
                                 std::size_t num_classes, const StumpOptions& options) {
  check_training_labels(labels, num_classes, features.rows());
  if (options.rounds < 0 || !(options.shrinkage > 0.0)) {
    throw InvalidArgument("invalid boosted stump options");
  }
  const Eigen::Index n = features.rows();
  const Eigen::MatrixXd y = one_hot(labels, num_classes);

  StumpEnsemble model;
  model.shrinkage = options.shrinkage;
  model.base.resize(num_classes);
  model.stumps.resize(num_classes);
  std::vector<double> residual(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < num_classes; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    model.base[j] = y.col(col).mean();
    Eigen::VectorXd fitted = Eigen::VectorXd::Constant(n, model.base[j]);
    for (int round = 0; round < options.rounds; ++round) {
      for (Eigen::Index i = 0; i < n; ++i) {
        residual[static_cast<std::size_t>(i)] = y(i, col) - fitted(i);
      }
      const Stump stump = best_stump(features, residual);
      for (Eigen::Index i = 0; i < n; ++i) {
        fitted(i) += options.shrinkage * stump(features.row(i));
      }
      model.stumps[j].push_back(stump);
    }
  }
  return model;
}

Eigen::MatrixXd boosted_stumps_logits(const StumpEnsemble& model,
                                      const Eigen::MatrixXd& features) {
  const auto m = static_cast<Eigen::Index>(model.base.size());
  Eigen::MatrixXd out(features.rows(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& stumps = model.stumps[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      double f = model.base[static_cast<std::size_t>(j)];
      for (const Stump& s : stumps) f += model.shrinkage * s(features.row(i));
      out(i, j) = f;
    }
  }
  return out;
}

ScoreMatrix train_and_score(const ClassifierKind& kind, const SampleSplit& split,
                            const DatasetPool& pool, const Hyperparameters& hyper) {
  const Hyperparameters h = resolved_hyperparameters(kind, hyper);
  if (const auto* external = std::get_if<ExternalKind>(&kind)) {
    check_training_labels(gather_labels(pool, split.train_indices), pool.num_classes(),
                          static_cast<Eigen::Index>(split.train_indices.size()));
    return run_external(*external, split, pool);
  }
  const Eigen::MatrixXd x_train = gather_features(pool, split.train_indices);
  const std::vector<int> y_train = gather_labels(pool, split.train_indices);
  const Eigen::MatrixXd x_test = gather_features(pool, split.test_indices);

  Eigen::MatrixXd logits;
  if (std::holds_alternative<LogisticKind>(kind)) {
    LogisticOptions options;
    options.epochs = static_cast<int>(h.at("epochs"));
    options.step = h.at("step");
    options.l2 = h.at("l2");
    logits = logistic_logits(fit_logistic(x_train, y_train, pool.num_classes(), options), x_test);
  } else {
    StumpOptions options;
    options.rounds = static_cast<int>(h.at("rounds"));
    options.shrinkage = h.at("shrinkage");
    logits = boosted_stumps_logits(
        fit_boosted_stumps(x_train, y_train, pool.num_classes(), options), x_test);
  }
  return ScoreMatrix(softmax_rows(logits));
}

}  // namespace mixrobust
