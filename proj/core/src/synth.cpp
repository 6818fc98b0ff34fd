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
#include "mixrobust/synth.hpp"

#include <random>

#include "mixrobust/error.hpp"
#include "mixrobust/random.hpp"

namespace mixrobust {

void SyntheticDataConfig::validate() const {
  if (m < 1 || d < 1 || n_per_class < 1) {
    throw InvalidArgument("synthetic pool needs positive m, d and n_per_class");
  }
  if (!(noise_scale > 0.0)) throw InvalidArgument("noise_scale must be positive");
  if (class_means.size() != m) throw InvalidArgument("need one mean vector per class");
  for (const auto& mean : class_means) {
    if (mean.size() != d) throw InvalidArgument("class mean has the wrong dimension");
  }
  if (!separability_boost.empty()) {
    if (separability_boost.size() != m) {
      throw InvalidArgument("need one separability boost per class");
    }
    for (double b : separability_boost) {
      if (!(b > 0.0)) throw InvalidArgument("separability boosts must be positive");
    }
  }
}

std::vector<std::vector<double>> axis_means(std::size_t m, std::size_t d, double separation) {
  if (d == 0) throw InvalidArgument("axis_means: d must be positive");
  std::vector<std::vector<double>> means(m, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    // Classes beyond d reuse an axis in the opposite direction.
    const double sign = ((j / d) % 2 == 0) ? 1.0 : -1.0;
    means[j][j % d] = sign * separation * static_cast<double>(j / (2 * d) + 1);
  }
  return means;
}

DatasetPool generate_pool(const SyntheticDataConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, SeedPurpose::kSyntheticPool));
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> features;
  std::vector<int> labels;
  features.reserve(config.m * config.n_per_class * config.d);
  labels.reserve(config.m * config.n_per_class);
  for (std::size_t j = 0; j < config.m; ++j) {
    const double boost = config.separability_boost.empty() ? 1.0 : config.separability_boost[j];
    const double scale = config.noise_scale / boost;
    for (std::size_t i = 0; i < config.n_per_class; ++i) {
      for (std::size_t f = 0; f < config.d; ++f) {
        features.push_back(config.class_means[j][f] + scale * normal(rng));
      }
      labels.push_back(static_cast<int>(j + 1));
    }
  }
  return DatasetPool(config.m, config.d, std::move(features), std::move(labels));
}

}  // namespace mixrobust
