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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mixrobust/sampler.hpp"

namespace mixrobust {

// n_test x m matrix of row-normalized class probabilities.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  explicit ScoreMatrix(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

  // Rows sum to 1 within tol and entries lie in [0, 1]; throws InvalidArgument.
  void validate(double tol = 1e-9) const;

 private:
  Eigen::MatrixXd values_;
};

// Row-wise softmax; the normalizer is summed in sorted order so that permuting
// columns permutes the output exactly.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

struct LogisticKind {};
struct BoostedStumpsKind {};
struct ExternalKind {
  std::string command;            // program (shell syntax allowed); gets the workdir
  std::filesystem::path workdir;  // created if missing
};

using ClassifierKind = std::variant<LogisticKind, BoostedStumpsKind, ExternalKind>;

std::string classifier_name(const ClassifierKind& kind);

using Hyperparameters = std::map<std::string, double>;

// Defaults filled in for the kind: logistic {epochs 500, step 0.1, l2 1e-4};
// boosted_stumps {rounds 100, shrinkage 0.1}; external none.
Hyperparameters resolved_hyperparameters(const ClassifierKind& kind,
                                         const Hyperparameters& overrides);

// Feature matrix of the given pool rows, and their 1-based labels.
Eigen::MatrixXd gather_features(const DatasetPool& pool, std::span<const std::size_t> rows);
std::vector<int> gather_labels(const DatasetPool& pool, std::span<const std::size_t> rows);

// --- one-vs-rest logistic regression -------------------------------------

struct LogisticOptions {
  int epochs = 500;
  double step = 0.1;
  double l2 = 1e-4;
};

struct LogisticModel {
  Eigen::RowVectorXd center;  // training feature means
  Eigen::RowVectorXd scale;   // training feature standard deviations
  Eigen::MatrixXd weights;    // (d + 1) x m, bias in the last row
  std::vector<double> loss_trace;  // objective before each epoch, then final
};

// Full-batch gradient descent on the summed one-vs-rest penalized log loss
// over standardized features.
LogisticModel fit_logistic(const Eigen::MatrixXd& features, std::span<const int> labels,
                           std::size_t num_classes, const LogisticOptions& options = {});
Eigen::MatrixXd logistic_logits(const LogisticModel& model, const Eigen::MatrixXd& features);

// --- one-vs-rest boosted decision stumps ---------------------------------

struct Stump {
  Eigen::Index feature = 0;
  double threshold = 0.0;  // x <= threshold goes left
  double left = 0.0;
  double right = 0.0;

  double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    return x(feature) <= threshold ? left : right;
  }
};

struct StumpOptions {
  int rounds = 100;
  double shrinkage = 0.1;
};

struct StumpEnsemble {
  std::vector<double> base;                // per class, training prevalence
  std::vector<std::vector<Stump>> stumps;  // per class, one per round
  double shrinkage = 0.1;
};

// Stump minimizing the squared error of a piecewise-constant fit to the
// residuals, over every feature and every midpoint between distinct sorted
// values. Ties keep the lowest feature, then the lowest threshold.
Stump best_stump(const Eigen::MatrixXd& features, std::span<const double> residuals);

StumpEnsemble fit_boosted_stumps(const Eigen::MatrixXd& features, std::span<const int> labels,
                                 std::size_t num_classes, const StumpOptions& options = {});
Eigen::MatrixXd boosted_stumps_logits(const StumpEnsemble& model,
                                      const Eigen::MatrixXd& features);

// --- external runner ------------------------------------------------------

// Writes <workdir>/train.csv and <workdir>/test.csv, runs the command with the
// workdir as its single argument, and reads <workdir>/scores.csv
// (header score_1..score_m, one row per test row, rows summing to 1 within
// 1e-6). Throws ExternalRunnerError with the captured output on failure.
ScoreMatrix run_external(const ExternalKind& kind, const SampleSplit& split,
                         const DatasetPool& pool);

// Trains the classifier on the training multiset and scores the test rows.
// Throws InvalidArgument when the training multiset covers fewer than two
// classes.
ScoreMatrix train_and_score(const ClassifierKind& kind, const SampleSplit& split,
                            const DatasetPool& pool, const Hyperparameters& hyper = {});

}  // namespace mixrobust
