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
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mixrobust/design.hpp"
#include "mixrobust/random.hpp"

namespace mixrobust {

// Labeled observation pool. Labels are 1-based class ids; features are stored
// row-major with a fixed width. Immutable after construction.
class DatasetPool {
 public:
  DatasetPool(std::size_t num_classes, std::size_t dim, std::vector<double> features,
              std::vector<int> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return class_index_.size(); }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const noexcept { return labels_; }
  std::span<const double> features() const noexcept { return features_; }

  // Pool indices of class class_id (1-based), ascending.
  const std::vector<std::size_t>& class_members(int class_id) const;

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<int> labels_;
  std::vector<std::vector<std::size_t>> class_index_;
};

// Pool CSV: header label,f1..fd; 1-based integer labels. When expected_classes
// is given, labels outside 1..expected_classes are rejected; otherwise m is
// the largest label seen.
DatasetPool read_pool_csv(std::istream& in, std::optional<std::size_t> expected_classes = {});
DatasetPool load_pool_csv(const std::filesystem::path& path,
                          std::optional<std::size_t> expected_classes = {});
void write_pool_csv(std::ostream& out, const DatasetPool& pool);
// Writes exactly the listed rows in order, repeating duplicates.
void write_pool_rows(std::ostream& out, const DatasetPool& pool,
                     std::span<const std::size_t> rows);

struct SamplingConfig {
  double train_frac = 0.10;
  double test_frac = 0.25;

  void validate() const;
};

struct SampleSplit {
  std::vector<std::size_t> train_indices;  // multiset, draw order
  std::vector<std::size_t> test_indices;   // unique, ascending
  std::vector<std::size_t> train_counts;
  std::vector<std::size_t> test_counts;
};

// Largest-remainder apportionment of total over the mixture; remainder ties go
// to the lower class index.
std::vector<std::size_t> class_counts(const MixturePoint& mixture, std::size_t total);

// counts[j] uniform draws with replacement from class j+1.
std::vector<std::size_t> compose_training(const DatasetPool& pool,
                                          std::span<const std::size_t> counts, Rng& rng);

// Per class, counts[j] draws without replacement from the members of class
// j+1 that do not appear in train. Throws SamplingError naming the first class
// that runs short.
std::vector<std::size_t> compose_test(const DatasetPool& pool,
                                      std::span<const std::size_t> train,
                                      std::span<const std::size_t> counts, Rng& rng);

// Sizes both splits from the pool total and draws them with streams derived
// from the run seed.
SampleSplit draw_split(const DatasetPool& pool, const RunSpec& run,
                       const SamplingConfig& sampling);

}  // namespace mixrobust
