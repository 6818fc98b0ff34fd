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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mixrobust/classifiers.hpp"
#include "mixrobust/design.hpp"
#include "mixrobust/error.hpp"
#include "mixrobust/sampler.hpp"
#include "mixrobust/synth.hpp"

namespace mixrobust::cli {

// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ClassifierSpec {
  ClassifierKind kind;
  Hyperparameters hyper;  // resolved, defaults filled in
};

struct PoolSpec {
  std::string name;
  std::optional<SyntheticDataConfig> synthetic;
  std::filesystem::path csv;  // used when synthetic is empty
  bool seed_from_master = false;  // synthetic seed derived from the master seed
};

enum class CovariateRole { kClassifier, kPool, kNone };

struct ExperimentConfig {
  std::filesystem::path base_dir;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "out";
  DesignConfig design;
  std::vector<CovariateRole> roles;  // one per design covariate
  // One entry per level of the classifier covariate, or a single default.
  std::vector<ClassifierSpec> classifiers;
  std::vector<PoolSpec> pools;
  SamplingConfig sampling;
  std::vector<TestScenario> scenarios{kAllScenarios.begin(), kAllScenarios.end()};
  int contour_resolution = 100;
  int contour_levels = 10;
  std::size_t jobs = 0;  // 0 means available parallelism

  // Index into classifiers / pools for a run's covariate levels.
  std::size_t classifier_index(std::span<const double> z) const;
  std::size_t pool_index(std::span<const double> z) const;
};

// Relative paths in the document resolve against base_dir.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

// Seeds of synthetic pools that do not set one are derived from the master
// seed, so they follow a --seed override.
void assign_pool_seeds(ExperimentConfig& config);

}  // namespace mixrobust::cli
