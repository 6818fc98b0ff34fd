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
#include <cstdint>
#include <vector>

#include "mixrobust/sampler.hpp"

namespace mixrobust {

// Gaussian class clusters standing in for a real labeled dataset.
struct SyntheticDataConfig {
  std::size_t m = 3;
  std::size_t d = 2;
  std::size_t n_per_class = 1000;
  std::vector<std::vector<double>> class_means;  // m vectors of length d
  double noise_scale = 1.0;
  std::vector<double> separability_boost;        // per class, > 0; empty means all 1
  std::uint64_t seed = 0;

  void validate() const;
};

// Class means at separation * e_j, cycling through axes when d < m.
std::vector<std::vector<double>> axis_means(std::size_t m, std::size_t d, double separation);

// Class j point = mean_j + noise_scale / boost_j * N(0, I_d). Rows are grouped
// by class in label order.
DatasetPool generate_pool(const SyntheticDataConfig& config);

}  // namespace mixrobust
