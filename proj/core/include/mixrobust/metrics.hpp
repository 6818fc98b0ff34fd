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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mixrobust/classifiers.hpp"
#include "mixrobust/design.hpp"

namespace mixrobust {

// Tie-corrected Mann-Whitney AUC: the probability that a random positive
// outscores a random negative, ties counting one half. Uses midranks,
// O(n log n). Throws NumericalError without positives or negatives.
double auc_mann_whitney(std::span<const double> scores, std::span<const bool> positive);

// One-vs-rest AUC of column class_id - 1 with label == class_id as positive.
double auc_ovr(const ScoreMatrix& scores, std::span<const int> labels, int class_id);

double mean_auc(std::span<const double> aucs);

struct LogSd {
  double value = 0.0;
  bool degenerate = false;  // SD fell below the 1e-8 floor
};

inline constexpr double kLogSdFloor = 1e-8;

// Natural log of the sample standard deviation (m - 1 denominator).
LogSd log_sd(std::span<const double> aucs);

struct RunOutcome {
  int run_id = 0;
  int replicate = 1;
  TestScenario scenario = TestScenario::kBalanced;
  std::vector<double> covariates;
  MixturePoint train_mixture;
  std::vector<double> aucs;
  double mean_auc = 0.0;
  double log_sd = 0.0;
  bool degenerate_sd = false;
};

// Fills mean_auc, log_sd and the flag from aucs.
RunOutcome make_outcome(const RunSpec& run, std::vector<double> aucs);

// Outcomes CSV:
// run_id,replicate,scenario,z1..zh,x1..xm,auc_1..auc_m,mean_auc,log_sd,degenerate_flag
void write_outcomes_csv(std::ostream& out, std::span<const RunOutcome> outcomes,
                        std::size_t m, std::size_t h);
std::string outcomes_csv(std::span<const RunOutcome> outcomes, std::size_t m, std::size_t h);

struct OutcomeTable {
  std::size_t m = 0;
  std::size_t h = 0;
  std::vector<RunOutcome> rows;
};
OutcomeTable read_outcomes_csv(std::istream& in);

}  // namespace mixrobust
