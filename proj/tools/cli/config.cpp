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
#include "cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "mixrobust/csv.hpp"
#include "mixrobust/random.hpp"

namespace mixrobust::cli {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::string_view where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + "." + key + ": " + e.what());
  }
}

ClassifierSpec parse_classifier(const json& obj, const std::filesystem::path& base,
                                std::string_view where) {
  check_keys(obj, where, {"kind", "hyper", "command", "workdir"});
  const auto kind = get_or<std::string>(obj, "kind", "", where);
  ClassifierSpec spec;
  if (kind == "logistic") {
    spec.kind = LogisticKind{};
  } else if (kind == "boosted_stumps") {
    spec.kind = BoostedStumpsKind{};
  } else if (kind == "external") {
    ExternalKind ext;
    ext.command = get_or<std::string>(obj, "command", "", where);
    if (ext.command.empty()) throw ConfigError(std::string(where) + ": external needs a command");
    const auto workdir = get_or<std::string>(obj, "workdir", "", where);
    if (!workdir.empty()) ext.workdir = base / workdir;
    spec.kind = ext;
  } else {
    throw ConfigError(std::string(where) + ": unknown classifier kind '" + kind + "'");
  }
  const auto hyper = get_or<std::map<std::string, double>>(obj, "hyper", {}, where);
  try {
    spec.hyper = resolved_hyperparameters(spec.kind, hyper);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string(where) + ": " + e.what());
  }
  return spec;
}

PoolSpec parse_pool(const json& obj, const std::filesystem::path& base, std::size_t m,
                    std::string name, std::string_view where) {
  check_keys(obj, where, {"synthetic", "csv"});
  PoolSpec spec;
  spec.name = std::move(name);
  if (obj.contains("synthetic") == obj.contains("csv")) {
    throw ConfigError(std::string(where) + ": give exactly one of synthetic or csv");
  }
  if (obj.contains("csv")) {
    spec.csv = base / get_or<std::string>(obj, "csv", "", where);
    return spec;
  }
  const json& s = obj.at("synthetic");
  const std::string sw = std::string(where) + ".synthetic";
  check_keys(s, sw, {"d", "n_per_class", "separation", "class_means", "noise_scale",
                     "separability_boost", "seed"});
  SyntheticDataConfig cfg;
  cfg.m = m;
  cfg.d = get_or<std::size_t>(s, "d", 2, sw);
  cfg.n_per_class = get_or<std::size_t>(s, "n_per_class", 1000, sw);
  cfg.noise_scale = get_or<double>(s, "noise_scale", 1.0, sw);
  cfg.separability_boost = get_or<std::vector<double>>(s, "separability_boost", {}, sw);
  if (s.contains("class_means")) {
    if (s.contains("separation")) throw ConfigError(sw + ": class_means and separation conflict");
    cfg.class_means = get_or<std::vector<std::vector<double>>>(s, "class_means", {}, sw);
  } else {
    cfg.class_means = axis_means(m, cfg.d, get_or<double>(s, "separation", 2.0, sw));
  }
  if (s.contains("seed")) {
    cfg.seed = get_or<std::uint64_t>(s, "seed", 0, sw);
  } else {
    spec.seed_from_master = true;
  }
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(sw + ": " + e.what());
  }
  spec.synthetic = cfg;
  return spec;
}

std::size_t level_position(const ExperimentConfig& config, CovariateRole role,
                           std::span<const double> z) {
  for (std::size_t k = 0; k < config.roles.size(); ++k) {
    if (config.roles[k] != role) continue;
    const auto& levels = config.design.covariates[k].levels;
    const auto it = std::find(levels.begin(), levels.end(), z[k]);
    if (it == levels.end()) {
      throw InvalidArgument("covariate " + config.design.covariates[k].name +
                            " has no level " + std::to_string(z[k]));
    }
    return static_cast<std::size_t>(it - levels.begin());
  }
  return 0;
}

}  // namespace

std::size_t ExperimentConfig::classifier_index(std::span<const double> z) const {
  return level_position(*this, CovariateRole::kClassifier, z);
}

std::size_t ExperimentConfig::pool_index(std::span<const double> z) const {
  return level_position(*this, CovariateRole::kPool, z);
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "config", {"master_seed", "output_dir", "design", "covariates", "classifier",
                             "pool", "sampling", "scenarios", "contour", "jobs"});
  ExperimentConfig config;
  config.base_dir = base_dir;
  config.master_seed = get_or<std::uint64_t>(doc, "master_seed", 0, "config");
  config.output_dir = base_dir / get_or<std::string>(doc, "output_dir", "out", "config");
  config.jobs = get_or<std::size_t>(doc, "jobs", 0, "config");

  if (!doc.contains("design")) throw ConfigError("config: missing design");
  const json& d = doc.at("design");
  check_keys(d, "design", {"m", "min_prop", "replicates"});
  config.design.m = get_or<std::size_t>(d, "m", 3, "design");
  config.design.min_prop = get_or<double>(d, "min_prop", 0.0, "design");
  config.design.replicates = get_or<std::size_t>(d, "replicates", 1, "design");
  const std::size_t m = config.design.m;

  std::set<std::string> names;
  bool has_classifier = false;
  bool has_pool = false;
  const json covariates = doc.value("covariates", json::array());
  if (!covariates.is_array()) throw ConfigError("covariates must be an array");
  for (std::size_t k = 0; k < covariates.size(); ++k) {
    const json& c = covariates[k];
    const std::string where = "covariates[" + std::to_string(k) + "]";
    check_keys(c, where, {"name", "role", "levels"});
    CovariateFactor factor;
    factor.name = get_or<std::string>(c, "name", "z" + std::to_string(k + 1), where);
    if (!names.insert(factor.name).second) throw ConfigError(where + ": duplicate name");
    const auto role = get_or<std::string>(c, "role", "none", where);
    CovariateRole r;
    if (role == "classifier") {
      if (has_classifier) throw ConfigError("only one covariate may select the classifier");
      has_classifier = true;
      r = CovariateRole::kClassifier;
    } else if (role == "pool") {
      if (has_pool) throw ConfigError("only one covariate may select the pool");
      has_pool = true;
      r = CovariateRole::kPool;
    } else if (role == "none") {
      r = CovariateRole::kNone;
    } else {
      throw ConfigError(where + ": unknown role '" + role + "'");
    }
    if (!c.contains("levels") || !c.at("levels").is_array() || c.at("levels").empty()) {
      throw ConfigError(where + ": levels must be a nonempty array");
    }
    for (std::size_t l = 0; l < c.at("levels").size(); ++l) {
      const json& level = c.at("levels")[l];
      const std::string lw = where + ".levels[" + std::to_string(l) + "]";
      if (level.is_number()) {
        if (r != CovariateRole::kNone) throw ConfigError(lw + ": needs a " + role + " entry");
        factor.levels.push_back(level.get<double>());
        continue;
      }
      check_keys(level, lw, {"value", "classifier", "pool"});
      if (!level.contains("value")) throw ConfigError(lw + ": missing value");
      const double value = get_or<double>(level, "value", 0.0, lw);
      if (std::find(factor.levels.begin(), factor.levels.end(), value) != factor.levels.end()) {
        throw ConfigError(lw + ": duplicate level value");
      }
      factor.levels.push_back(value);
      const bool wants_classifier = r == CovariateRole::kClassifier;
      const bool wants_pool = r == CovariateRole::kPool;
      if (level.contains("classifier") != wants_classifier ||
          level.contains("pool") != wants_pool) {
        throw ConfigError(lw + ": level entries must match the covariate role");
      }
      if (wants_classifier) {
        config.classifiers.push_back(parse_classifier(level.at("classifier"), base_dir, lw));
      }
      if (wants_pool) {
        config.pools.push_back(parse_pool(level.at("pool"), base_dir, m,
                                          factor.name + "=" + csv::exact(value), lw));
      }
    }
    config.design.covariates.push_back(std::move(factor));
    config.roles.push_back(r);
  }
  if (has_classifier == doc.contains("classifier")) {
    throw ConfigError("configure the classifier either per covariate level or at top level");
  }
  if (has_pool == doc.contains("pool")) {
    throw ConfigError("configure the pool either per covariate level or at top level");
  }
  if (!has_classifier) config.classifiers.push_back(parse_classifier(doc.at("classifier"), base_dir, "classifier"));
  if (!has_pool) config.pools.push_back(parse_pool(doc.at("pool"), base_dir, m, "pool", "pool"));

  if (doc.contains("sampling")) {
    const json& s = doc.at("sampling");
    check_keys(s, "sampling", {"train_frac", "test_frac"});
    config.sampling.train_frac = get_or<double>(s, "train_frac", 0.10, "sampling");
    config.sampling.test_frac = get_or<double>(s, "test_frac", 0.25, "sampling");
  }
  if (doc.contains("scenarios")) {
    config.scenarios.clear();
    for (const auto& name : get_or<std::vector<std::string>>(doc, "scenarios", {}, "config")) {
      try {
        const TestScenario s = parse_scenario(name);
        if (std::find(config.scenarios.begin(), config.scenarios.end(), s) ==
            config.scenarios.end()) {
          config.scenarios.push_back(s);
        }
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("scenarios: ") + e.what());
      }
    }
    if (config.scenarios.empty()) throw ConfigError("scenarios must not be empty");
  }
  if (doc.contains("contour")) {
    const json& c = doc.at("contour");
    check_keys(c, "contour", {"resolution", "levels"});
    config.contour_resolution = get_or<int>(c, "resolution", 100, "contour");
    config.contour_levels = get_or<int>(c, "levels", 10, "contour");
    if (config.contour_resolution < 2 || config.contour_levels < 1) {
      throw ConfigError("contour: resolution must be >= 2 and levels >= 1");
    }
  }
  try {
    config.design.validate();
    config.sampling.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  assign_pool_seeds(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path().empty() ? std::filesystem::path(".")
                                                      : path.parent_path());
}

void assign_pool_seeds(ExperimentConfig& config) {
  for (std::size_t i = 0; i < config.pools.size(); ++i) {
    PoolSpec& pool = config.pools[i];
    if (!pool.synthetic || !pool.seed_from_master) continue;
    pool.synthetic->seed = derive_seed(
        config.master_seed, {static_cast<std::uint64_t>(SeedPurpose::kSyntheticPool), i});
  }
}

}  // namespace mixrobust::cli
