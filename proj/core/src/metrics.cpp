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
#include "mixrobust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mixrobust/csv.hpp"
#include "mixrobust/error.hpp"

namespace mixrobust {

double auc_mann_whitney(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) {
    throw InvalidArgument("scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of midranks (1-based) of the positives.
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo + 1;
    while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double midrank = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t k = lo; k < hi; ++k) {
      if (positive[order[k]]) {
        rank_sum += midrank;
        ++n_pos;
      }
    }
    lo = hi;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw NumericalError("AUC needs at least one positive and one negative example");
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double auc_ovr(const ScoreMatrix& scores, std::span<const int> labels, int class_id) {
  if (static_cast<Eigen::Index>(labels.size()) != scores.rows()) {
    throw InvalidArgument("auc_ovr: one label per score row required");
  }
  if (class_id < 1 || class_id > scores.cols()) throw InvalidArgument("auc_ovr: bad class id");
  const Eigen::Index col = class_id - 1;
  std::vector<double> column(labels.size());
  // std::vector<bool> has no contiguous storage; use a byte buffer.
  std::unique_ptr<bool[]> positive(new bool[labels.size()]);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    column[i] = scores(static_cast<Eigen::Index>(i), col);
    positive[i] = labels[i] == class_id;
  }
  try {
    return auc_mann_whitney(column, std::span<const bool>(positive.get(), labels.size()));
  } catch (const NumericalError&) {
    throw NumericalError("class " + std::to_string(class_id) +
                         " has no positive or no negative test examples");
  }
}

double mean_auc(std::span<const double> aucs) {
  if (aucs.empty()) throw InvalidArgument("mean_auc of an empty vector");
  return std::accumulate(aucs.begin(), aucs.end(), 0.0) / static_cast<double>(aucs.size());
}

LogSd log_sd(std::span<const double> aucs) {
  if (aucs.size() < 2) throw InvalidArgument("log_sd needs at least two AUCs");
  const double mean = mean_auc(aucs);
  double ss = 0.0;
  for (double a : aucs) ss += (a - mean) * (a - mean);
  const double sd = std::sqrt(ss / static_cast<double>(aucs.size() - 1));
  if (sd < kLogSdFloor) return {std::log(kLogSdFloor), true};
  return {std::log(sd), false};
}

RunOutcome make_outcome(const RunSpec& run, std::vector<double> aucs) {
  RunOutcome out;
  out.run_id = run.run_id;
  out.replicate = run.replicate;
  out.scenario = run.scenario;
  out.covariates = run.covariates;
  out.train_mixture = run.train_mixture;
  out.mean_auc = mean_auc(aucs);
  const LogSd sd = log_sd(aucs);
  out.log_sd = sd.value;
  out.degenerate_sd = sd.degenerate;
  out.aucs = std::move(aucs);
  return out;
}

void write_outcomes_csv(std::ostream& out, std::span<const RunOutcome> outcomes,
                        std::size_t m, std::size_t h) {
  out << "run_id,replicate,scenario";
  for (std::size_t k = 1; k <= h; ++k) out << ",z" << k;
  for (std::size_t j = 1; j <= m; ++j) out << ",x" << j;
  for (std::size_t j = 1; j <= m; ++j) out << ",auc_" << j;
  out << ",mean_auc,log_sd,degenerate_flag\n";
  for (const auto& o : outcomes) {
    if (o.covariates.size() != h || o.train_mixture.size() != m || o.aucs.size() != m) {
      throw InvalidArgument("outcome row does not match m/h");
    }
    out << o.run_id << ',' << o.replicate << ',' << to_string(o.scenario);
    for (double z : o.covariates) out << ',' << csv::exact(z);
    for (double x : o.train_mixture.proportions) out << ',' << csv::fixed(x, 6);
    for (double a : o.aucs) out << ',' << csv::exact(a);
    out << ',' << csv::exact(o.mean_auc) << ',' << csv::exact(o.log_sd) << ','
        << (o.degenerate_sd ? 1 : 0) << '\n';
  }
}

std::string outcomes_csv(std::span<const RunOutcome> outcomes, std::size_t m, std::size_t h) {
  std::ostringstream ss;
  write_outcomes_csv(ss, outcomes, m, h);
  return ss.str();
}

OutcomeTable read_outcomes_csv(std::istream& in) {
  const csv::Table table = csv::read(in, "outcomes");
  const auto& hd = table.header;
  if (hd.size() < 3 || hd[0] != "run_id" || hd[1] != "replicate" || hd[2] != "scenario") {
    throw IoError("outcomes CSV must start with run_id,replicate,scenario");
  }
  OutcomeTable result;
  std::size_t pos = 3;
  while (pos < hd.size() && hd[pos] == "z" + std::to_string(result.h + 1)) {
    ++result.h;
    ++pos;
  }
  while (pos < hd.size() && hd[pos] == "x" + std::to_string(result.m + 1)) {
    ++result.m;
    ++pos;
  }
  const std::size_t m = result.m;
  const std::size_t h = result.h;
  if (m < 2 || hd.size() != 3 + h + 2 * m + 3) {
    throw IoError("outcomes CSV header must be run_id,replicate,scenario,z1..zh,x1..xm,"
                  "auc_1..auc_m,mean_auc,log_sd,degenerate_flag");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (hd[3 + h + m + j] != "auc_" + std::to_string(j + 1)) {
      throw IoError("outcomes CSV: expected auc_" + std::to_string(j + 1));
    }
  }
  if (hd[3 + h + 2 * m] != "mean_auc" || hd[4 + h + 2 * m] != "log_sd" ||
      hd[5 + h + 2 * m] != "degenerate_flag") {
    throw IoError("outcomes CSV must end with mean_auc,log_sd,degenerate_flag");
  }
  for (const auto& row : table.rows) {
    RunOutcome o;
    o.run_id = static_cast<int>(csv::to_integer(row[0], "outcomes run_id"));
    o.replicate = static_cast<int>(csv::to_integer(row[1], "outcomes replicate"));
    try {
      o.scenario = parse_scenario(row[2]);
    } catch (const InvalidArgument& e) {
      throw IoError(std::string("outcomes: ") + e.what());
    }
    for (std::size_t k = 0; k < h; ++k) o.covariates.push_back(csv::to_double(row[3 + k], "z"));
    std::vector<double> x;
    for (std::size_t j = 0; j < m; ++j) x.push_back(csv::to_double(row[3 + h + j], "x"));
    try {
      o.train_mixture = renormalized(std::move(x));
    } catch (const InvalidArgument& e) {
      throw IoError(std::string("outcomes: ") + e.what());
    }
    for (std::size_t j = 0; j < m; ++j) o.aucs.push_back(csv::to_double(row[3 + h + m + j], "auc"));
    o.mean_auc = csv::to_double(row[3 + h + 2 * m], "mean_auc");
    o.log_sd = csv::to_double(row[4 + h + 2 * m], "log_sd");
    o.degenerate_sd = csv::to_integer(row[5 + h + 2 * m], "degenerate_flag") != 0;
    result.rows.push_back(std::move(o));
  }
  return result;
}

}  // namespace mixrobust
