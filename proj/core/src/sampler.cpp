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
#include "mixrobust/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "mixrobust/csv.hpp"
#include "mixrobust/error.hpp"

namespace mixrobust {

DatasetPool::DatasetPool(std::size_t num_classes, std::size_t dim,
                         std::vector<double> features, std::vector<int> labels)
    : dim_(dim), features_(std::move(features)), labels_(std::move(labels)) {
  if (num_classes < 1) throw InvalidArgument("pool needs at least one class");
  if (dim_ == 0) throw InvalidArgument("pool feature width must be positive");
  if (features_.size() != labels_.size() * dim_) {
    throw InvalidArgument("pool features are not rectangular");
  }
  class_index_.resize(num_classes);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int label = labels_[i];
    if (label < 1 || static_cast<std::size_t>(label) > num_classes) {
      throw InvalidArgument("label " + std::to_string(label) + " outside 1.." +
                            std::to_string(num_classes));
    }
    class_index_[static_cast<std::size_t>(label - 1)].push_back(i);
  }
}

const std::vector<std::size_t>& DatasetPool::class_members(int class_id) const {
  if (class_id < 1 || static_cast<std::size_t>(class_id) > class_index_.size()) {
    throw InvalidArgument("class id " + std::to_string(class_id) + " out of range");
  }
  return class_index_[static_cast<std::size_t>(class_id - 1)];
}

DatasetPool read_pool_csv(std::istream& in, std::optional<std::size_t> expected_classes) {
  const csv::Table table = csv::read(in, "pool");
  if (table.header.size() < 2 || table.header[0] != "label") {
    throw IoError("pool CSV header must be label,f1..fd");
  }
  const std::size_t d = table.header.size() - 1;
  for (std::size_t f = 0; f < d; ++f) {
    if (table.header[f + 1] != "f" + std::to_string(f + 1)) {
      throw IoError("pool CSV header must be label,f1..fd");
    }
  }
  std::vector<double> features;
  std::vector<int> labels;
  features.reserve(table.rows.size() * d);
  labels.reserve(table.rows.size());
  int max_label = 0;
  for (const auto& row : table.rows) {
    const long long label = csv::to_integer(row[0], "pool label");
    if (label < 1) throw IoError("pool labels must be positive integers");
    if (expected_classes && static_cast<std::size_t>(label) > *expected_classes) {
      throw IoError("pool label " + std::to_string(label) + " exceeds m = " +
                    std::to_string(*expected_classes));
    }
    labels.push_back(static_cast<int>(label));
    max_label = std::max(max_label, static_cast<int>(label));
    for (std::size_t f = 0; f < d; ++f) features.push_back(csv::to_double(row[f + 1], "pool feature"));
  }
  const std::size_t m = expected_classes.value_or(static_cast<std::size_t>(max_label));
  if (m < 1) throw IoError("pool has no rows");
  return DatasetPool(m, d, std::move(features), std::move(labels));
}

DatasetPool load_pool_csv(const std::filesystem::path& path,
                          std::optional<std::size_t> expected_classes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pool " + path.string());
  return read_pool_csv(in, expected_classes);
}

void write_pool_rows(std::ostream& out, const DatasetPool& pool,
                     std::span<const std::size_t> rows) {
  out << "label";
  for (std::size_t f = 1; f <= pool.dim(); ++f) out << ",f" << f;
  out << '\n';
  for (std::size_t i : rows) {
    out << pool.label(i);
    for (double v : pool.row(i)) out << ',' << csv::exact(v);
    out << '\n';
  }
}

void write_pool_csv(std::ostream& out, const DatasetPool& pool) {
  std::vector<std::size_t> all(pool.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  write_pool_rows(out, pool, all);
}

void SamplingConfig::validate() const {
  if (!(train_frac > 0.0) || !(test_frac > 0.0) || train_frac > 1.0 || test_frac > 1.0) {
    throw InvalidArgument("train_frac and test_frac must lie in (0, 1]");
  }
}

std::vector<std::size_t> class_counts(const MixturePoint& mixture, std::size_t total) {
  if (total == 0) throw InvalidArgument("class_counts: total must be positive");
  const std::size_t m = mixture.size();
  std::vector<std::size_t> counts(m);
  // Remainders are compared on a 1e-9 grid so that equal proportions that
  // went through different rounding still tie.
  std::vector<long long> remainder(m);
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (!(mixture[j] >= 0.0)) throw InvalidArgument("class_counts: negative proportion");
    double quota = mixture[j] * static_cast<double>(total);
    const double nearest = std::round(quota);
    if (std::abs(quota - nearest) < 1e-9) quota = nearest;
    const double base = std::floor(quota);
    counts[j] = static_cast<std::size_t>(base);
    remainder[j] = std::llround((quota - base) * 1e9);
    assigned += counts[j];
  }
  if (assigned > total) throw InvalidArgument("class_counts: proportions sum above 1");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  std::size_t left = total - assigned;
  if (left > m) throw InvalidArgument("class_counts: proportions do not sum to 1");
  for (std::size_t i = 0; i < left; ++i) ++counts[order[i]];
  return counts;
}

std::vector<std::size_t> compose_training(const DatasetPool& pool,
                                          std::span<const std::size_t> counts, Rng& rng) {
  if (counts.size() != pool.num_classes()) {
    throw InvalidArgument("compose_training: one count per class required");
  }
  std::vector<std::size_t> drawn;
  drawn.reserve(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    const auto& members = pool.class_members(static_cast<int>(j + 1));
    if (members.empty()) {
      throw SamplingError(static_cast<int>(j + 1), counts[j],
                          "class " + std::to_string(j + 1) +
                              " has no pool members but needs " + std::to_string(counts[j]) +
                              " training draws");
    }
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    for (std::size_t r = 0; r < counts[j]; ++r) drawn.push_back(members[pick(rng)]);
  }
  return drawn;
}

std::vector<std::size_t> compose_test(const DatasetPool& pool,
                                      std::span<const std::size_t> train,
                                      std::span<const std::size_t> counts, Rng& rng) {
  if (counts.size() != pool.num_classes()) {
    throw InvalidArgument("compose_test: one count per class required");
  }
  std::vector<bool> used(pool.size(), false);
  for (std::size_t i : train) {
    if (i >= pool.size()) throw InvalidArgument("compose_test: training index out of range");
    used[i] = true;
  }
  std::vector<std::size_t> chosen;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    std::vector<std::size_t> remaining;
    for (std::size_t i : pool.class_members(static_cast<int>(j + 1))) {
      if (!used[i]) remaining.push_back(i);
    }
    if (remaining.size() < counts[j]) {
      const std::size_t shortfall = counts[j] - remaining.size();
      throw SamplingError(static_cast<int>(j + 1), shortfall,
                          "class " + std::to_string(j + 1) + " has " +
                              std::to_string(remaining.size()) +
                              " points left after training but the test split needs " +
                              std::to_string(counts[j]) + " (shortfall " +
                              std::to_string(shortfall) + ")");
    }
    // Partial Fisher-Yates.
    for (std::size_t r = 0; r < counts[j]; ++r) {
      std::uniform_int_distribution<std::size_t> pick(r, remaining.size() - 1);
      std::swap(remaining[r], remaining[pick(rng)]);
      chosen.push_back(remaining[r]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

SampleSplit draw_split(const DatasetPool& pool, const RunSpec& run,
                       const SamplingConfig& sampling) {
  sampling.validate();
  if (!run.test_mixture) throw InvalidArgument("run has no test mixture");
  if (run.train_mixture.size() != pool.num_classes()) {
    throw InvalidArgument("run mixture dimension differs from the pool's class count");
  }
  const auto n = static_cast<double>(pool.size());
  const auto n_train = static_cast<std::size_t>(std::llround(sampling.train_frac * n));
  const auto n_test = static_cast<std::size_t>(std::llround(sampling.test_frac * n));

  SampleSplit split;
  split.train_counts = class_counts(run.train_mixture, n_train);
  split.test_counts = class_counts(*run.test_mixture, n_test);
  Rng train_rng(derive_seed(run.seed, SeedPurpose::kTrainingDraw));
  Rng test_rng(derive_seed(run.seed, SeedPurpose::kTestDraw));
  split.train_indices = compose_training(pool, split.train_counts, train_rng);
  split.test_indices = compose_test(pool, split.train_indices, split.test_counts, test_rng);
  return split;
}

}  // namespace mixrobust
