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
#include "mixrobust/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mixrobust/csv.hpp"
#include "mixrobust/error.hpp"

namespace mixrobust {
namespace {

constexpr double kDesignTolerance = 1e-9;

// Nonempty subsets of {0..m-1} by size, then lexicographic.
std::vector<std::vector<std::size_t>> ordered_subsets(std::size_t m) {
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t k = 1; k <= m; ++k) {
    std::vector<bool> select(m, false);
    std::fill(select.begin(), select.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
      std::vector<std::size_t> subset;
      for (std::size_t j = 0; j < m; ++j) {
        if (select[j]) subset.push_back(j);
      }
      subsets.push_back(std::move(subset));
    } while (std::prev_permutation(select.begin(), select.end()));
  }
  return subsets;
}

MixturePoint rank_reversed(const MixturePoint& train) {
  const std::size_t m = train.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return train[a] < train[b];
  });
  MixturePoint out{std::vector<double>(m)};
  for (std::size_t i = 0; i < m; ++i) {
    out.proportions[order[i]] = train[order[m - 1 - i]];
  }
  return out;
}

}  // namespace

double MixturePoint::sum() const noexcept {
  return std::accumulate(proportions.begin(), proportions.end(), 0.0);
}

double distance_inf(const MixturePoint& a, const MixturePoint& b) {
  if (a.size() != b.size()) throw InvalidArgument("mixture points differ in dimension");
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

std::string_view to_string(TestScenario scenario) {
  switch (scenario) {
    case TestScenario::kBalanced: return "balanced";
    case TestScenario::kConsistent: return "consistent";
    case TestScenario::kReverse: return "reverse";
  }
  return "unknown";
}

TestScenario parse_scenario(std::string_view name) {
  for (TestScenario s : kAllScenarios) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown scenario '" + std::string(name) +
                        "' (expected balanced, consistent or reverse)");
}

void DesignConfig::validate() const {
  if (m < 2) throw InvalidArgument("design needs at least 2 classes");
  if (!(min_prop >= 0.0) || min_prop * static_cast<double>(m) >= 1.0) {
    throw InvalidArgument("min_prop must lie in [0, 1/m); got " + csv::exact(min_prop));
  }
  if (replicates < 1) throw InvalidArgument("replicates must be at least 1");
  for (const auto& factor : covariates) {
    if (factor.levels.empty()) {
      throw InvalidArgument("covariate '" + factor.name + "' has no levels");
    }
  }
}

std::vector<MixturePoint> simplex_centroid(std::size_t m, double min_prop) {
  DesignConfig probe;
  probe.m = m;
  probe.min_prop = min_prop;
  probe.validate();

  std::vector<MixturePoint> points;
  for (const auto& subset : ordered_subsets(m)) {
    points.push_back(design_point(m, subset, min_prop));
  }
  return points;
}

MixturePoint design_point(std::size_t m, std::span<const std::size_t> support,
                          double min_prop) {
  if (support.empty()) throw InvalidArgument("design point support must be nonempty");
  const double k = static_cast<double>(support.size());
  const double share = (1.0 - (static_cast<double>(m) - k) * min_prop) / k;
  MixturePoint point{std::vector<double>(m, min_prop)};
  for (std::size_t j : support) {
    if (j >= m) throw InvalidArgument("support index out of range");
    point.proportions[j] = share;
  }
  return point;
}

RunPlan cross_array(std::span<const MixturePoint> points, const DesignConfig& config) {
  config.validate();
  if (points.empty()) throw InvalidArgument("cross_array needs at least one mixture point");
  for (const auto& p : points) {
    if (p.size() != config.m) throw InvalidArgument("mixture point dimension differs from m");
  }

  // Full factorial with the first factor varying slowest.
  std::vector<std::vector<double>> combos{{}};
  for (const auto& factor : config.covariates) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : combos) {
      for (double level : factor.levels) {
        auto row = prefix;
        row.push_back(level);
        next.push_back(std::move(row));
      }
    }
    combos = std::move(next);
  }

  RunPlan plan;
  plan.config = config;
  int run_id = 1;
  for (const auto& z : combos) {
    for (const auto& x : points) {
      RunSpec run;
      run.run_id = run_id++;
      run.train_mixture = x;
      run.covariates = z;
      plan.runs.push_back(std::move(run));
    }
  }
  return plan;
}

std::optional<std::vector<std::size_t>> design_support(const MixturePoint& point,
                                                       double min_prop) {
  const std::size_t m = point.size();
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < m; ++j) {
    if (point[j] > min_prop + kDesignTolerance) support.push_back(j);
  }
  if (support.empty()) return std::nullopt;
  if (distance_inf(point, design_point(m, support, min_prop)) > kDesignTolerance) {
    return std::nullopt;
  }
  return support;
}

MixturePoint scenario_test_proportions(const MixturePoint& train, TestScenario scenario,
                                       double min_prop, Rng& rng) {
  const std::size_t m = train.size();
  if (m < 2) throw InvalidArgument("mixture needs at least 2 components");
  switch (scenario) {
    case TestScenario::kBalanced:
      return MixturePoint{std::vector<double>(m, 1.0 / static_cast<double>(m))};
    case TestScenario::kConsistent:
      return train;
    case TestScenario::kReverse:
      break;
  }

  const auto support = design_support(train, min_prop);
  if (!support) return rank_reversed(train);

  if (support->size() == m) {
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    const std::size_t dominant = pick(rng);
    return design_point(m, std::span<const std::size_t>(&dominant, 1), min_prop);
  }
  std::vector<std::size_t> complement;
  for (std::size_t j = 0, s = 0; j < m; ++j) {
    if (s < support->size() && (*support)[s] == j) {
      ++s;
    } else {
      complement.push_back(j);
    }
  }
  return design_point(m, complement, min_prop);
}

std::uint64_t run_instance_seed(std::uint64_t master_seed, int run_id, int replicate,
                                TestScenario scenario) noexcept {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(SeedPurpose::kRunInstance),
                                   static_cast<std::uint64_t>(run_id),
                                   static_cast<std::uint64_t>(replicate),
                                   static_cast<std::uint64_t>(scenario)});
}

RunPlan expand_run_instances(const RunPlan& base, std::span<const TestScenario> scenarios) {
  base.config.validate();
  RunPlan plan;
  plan.config = base.config;
  const int replicates = static_cast<int>(base.config.replicates);
  for (TestScenario scenario : scenarios) {
    for (int rep = 1; rep <= replicates; ++rep) {
      for (const auto& run : base.runs) {
        RunSpec instance = run;
        instance.scenario = scenario;
        instance.replicate = rep;
        instance.seed = run_instance_seed(base.config.seed, run.run_id, rep, scenario);
        // Keyed without the scenario so the REVERSE choice depends only on
        // (master seed, run_id, replicate).
        Rng rng(derive_seed(base.config.seed,
                            {static_cast<std::uint64_t>(SeedPurpose::kReverseChoice),
                             static_cast<std::uint64_t>(run.run_id),
                             static_cast<std::uint64_t>(rep)}));
        instance.test_mixture =
            scenario_test_proportions(run.train_mixture, scenario, base.config.min_prop, rng);
        plan.runs.push_back(std::move(instance));
      }
    }
  }
  return plan;
}

RunPlan make_run_plan(const DesignConfig& config, std::span<const TestScenario> scenarios) {
  const auto points = simplex_centroid(config.m, config.min_prop);
  return expand_run_instances(cross_array(points, config), scenarios);
}

MixturePoint renormalized(std::vector<double> proportions) {
  double total = 0.0;
  for (double v : proportions) {
    if (!(v >= 0.0)) throw InvalidArgument("negative or NaN proportion");
    total += v;
  }
  if (!(total > 0.0)) throw InvalidArgument("proportions sum to zero");
  for (double& v : proportions) v /= total;
  return MixturePoint{std::move(proportions)};
}

void write_plan_csv(std::ostream& out, const RunPlan& plan) {
  const std::size_t m = plan.config.m;
  const std::size_t h = plan.config.h();
  out << "run_id,scenario,replicate";
  for (std::size_t j = 1; j <= m; ++j) out << ",x" << j;
  for (std::size_t k = 1; k <= h; ++k) out << ",z" << k;
  for (std::size_t j = 1; j <= m; ++j) out << ",test_x" << j;
  out << ",seed\n";
  for (const auto& run : plan.runs) {
    if (!run.test_mixture) throw InvalidArgument("plan row without a test mixture");
    out << run.run_id << ',' << to_string(run.scenario) << ',' << run.replicate;
    for (double v : run.train_mixture.proportions) out << ',' << csv::fixed(v, 6);
    for (double z : run.covariates) out << ',' << csv::exact(z);
    for (double v : run.test_mixture->proportions) out << ',' << csv::fixed(v, 6);
    out << ',' << run.seed << '\n';
  }
}

std::string plan_csv(const RunPlan& plan) {
  std::ostringstream ss;
  write_plan_csv(ss, plan);
  return ss.str();
}

RunPlan read_plan_csv(std::istream& in) {
  const csv::Table table = csv::read(in, "plan");
  std::size_t m = 0;
  std::size_t h = 0;
  while (m < table.header.size() && table.header.size() > 3 + m &&
         table.header[3 + m] == "x" + std::to_string(m + 1)) {
    ++m;
  }
  while (3 + m + h < table.header.size() &&
         table.header[3 + m + h] == "z" + std::to_string(h + 1)) {
    ++h;
  }
  if (m < 2 || table.header.size() != 4 + 2 * m + h || table.header[0] != "run_id" ||
      table.header[1] != "scenario" || table.header[2] != "replicate" ||
      table.header.back() != "seed") {
    throw IoError("plan CSV header is not run_id,scenario,replicate,x1..xm,z1..zh,"
                  "test_x1..test_xm,seed");
  }

  RunPlan plan;
  plan.config.m = m;
  plan.config.covariates.resize(h);
  for (std::size_t k = 0; k < h; ++k) plan.config.covariates[k].name = "z" + std::to_string(k + 1);
  int max_rep = 1;
  for (const auto& row : table.rows) {
    RunSpec run;
    run.run_id = static_cast<int>(csv::to_integer(row[0], "plan run_id"));
    try {
      run.scenario = parse_scenario(row[1]);
    } catch (const InvalidArgument& e) {
      throw IoError(std::string("plan: ") + e.what());
    }
    run.replicate = static_cast<int>(csv::to_integer(row[2], "plan replicate"));
    std::vector<double> x(m);
    std::vector<double> tx(m);
    for (std::size_t j = 0; j < m; ++j) {
      x[j] = csv::to_double(row[3 + j], "plan x");
      tx[j] = csv::to_double(row[3 + m + h + j], "plan test_x");
    }
    run.covariates.resize(h);
    for (std::size_t k = 0; k < h; ++k) {
      run.covariates[k] = csv::to_double(row[3 + m + k], "plan z");
      auto& levels = plan.config.covariates[k].levels;
      if (std::find(levels.begin(), levels.end(), run.covariates[k]) == levels.end()) {
        levels.push_back(run.covariates[k]);
      }
    }
    try {
      run.train_mixture = renormalized(std::move(x));
      run.test_mixture = renormalized(std::move(tx));
    } catch (const InvalidArgument& e) {
      throw IoError(std::string("plan: ") + e.what());
    }
    run.seed = csv::to_uint64(row.back(), "plan seed");
    max_rep = std::max(max_rep, run.replicate);
    plan.runs.push_back(std::move(run));
  }
  plan.config.replicates = static_cast<std::size_t>(max_rep);
  double floor = 1.0;
  for (const auto& run : plan.runs) {
    for (double v : run.train_mixture.proportions) floor = std::min(floor, v);
  }
  plan.config.min_prop = plan.runs.empty() ? 0.0 : floor;
  return plan;
}

}  // namespace mixrobust
