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

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixrobust/random.hpp"

namespace mixrobust {

// Class-label proportions (x_1, ..., x_m) of one data split.
struct MixturePoint {
  std::vector<double> proportions;

  std::size_t size() const noexcept { return proportions.size(); }
  double operator[](std::size_t j) const { return proportions[j]; }
  double sum() const noexcept;

  bool operator==(const MixturePoint&) const = default;
};

// Max absolute coordinate difference.
double distance_inf(const MixturePoint& a, const MixturePoint& b);

// Rule deriving test-set proportions from training proportions.
enum class TestScenario { kBalanced, kConsistent, kReverse };

inline constexpr std::array<TestScenario, 3> kAllScenarios = {
    TestScenario::kBalanced, TestScenario::kConsistent, TestScenario::kReverse};

std::string_view to_string(TestScenario scenario);
TestScenario parse_scenario(std::string_view name);

struct CovariateFactor {
  std::string name;
  std::vector<double> levels;
};

struct DesignConfig {
  std::size_t m = 3;
  std::vector<CovariateFactor> covariates;
  double min_prop = 0.0;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;

  std::size_t h() const noexcept { return covariates.size(); }
  // Throws InvalidArgument on m < 2, min_prop outside [0, 1/m), replicates == 0
  // or a factor without levels.
  void validate() const;
};

// One experimental run. After cross_array only the mixture and covariates are
// set; expand_run_instances fills scenario, test mixture, replicate and seed.
struct RunSpec {
  int run_id = 0;
  MixturePoint train_mixture;
  std::vector<double> covariates;
  TestScenario scenario = TestScenario::kBalanced;
  std::optional<MixturePoint> test_mixture;
  int replicate = 1;
  std::uint64_t seed = 0;
};

struct RunPlan {
  DesignConfig config;
  std::vector<RunSpec> runs;
};

// Constrained simplex-centroid design: one point per nonempty subset S of the
// m components, with min_prop outside S and the remainder split evenly in S.
// Ordered by subset size, then lexicographically; the centroid comes last.
std::vector<MixturePoint> simplex_centroid(std::size_t m, double min_prop);

// Cartesian product of the mixture points with the covariate full factorial.
// The first factor varies slowest; mixture points vary fastest within a
// covariate block. run_ids are 1..N.
RunPlan cross_array(std::span<const MixturePoint> points, const DesignConfig& config);

// Components of a constrained simplex-centroid point that sit above the floor,
// or nullopt when the point is not such a design point.
std::optional<std::vector<std::size_t>> design_support(const MixturePoint& point,
                                                       double min_prop);

// The design point whose support is exactly the given components.
MixturePoint design_point(std::size_t m, std::span<const std::size_t> support,
                          double min_prop);

// Test-set proportions for a training mixture under the scenario.
//
// REVERSE maps a design point to the design point supported on the complement
// of its support, so a single dominant class becomes the minority in an even
// blend of the others and vice versa. The full-support centroid has an empty
// complement and instead maps to a pure-dominant point drawn uniformly from
// rng. Points that are not design points fall back to rank reversal: the
// largest proportion is swapped with the smallest, and so on, with ties kept
// in index order.
MixturePoint scenario_test_proportions(const MixturePoint& train, TestScenario scenario,
                                       double min_prop, Rng& rng);

// Seed of one run instance as a function of the master seed and its key.
std::uint64_t run_instance_seed(std::uint64_t master_seed, int run_id, int replicate,
                                TestScenario scenario) noexcept;

// Expands base runs into run instances, ordered scenario-major, then
// replicate, then run_id. Each instance gets its derived seed and its test
// mixture; the centroid's REVERSE draw uses the instance seed.
RunPlan expand_run_instances(const RunPlan& base, std::span<const TestScenario> scenarios);

// The complete plan: simplex_centroid, cross_array and expand_run_instances.
RunPlan make_run_plan(const DesignConfig& config, std::span<const TestScenario> scenarios);

// Plan CSV: run_id,scenario,replicate,x1..xm,z1..zh,test_x1..test_xm,seed.
// Proportions are written with 6 decimals and renormalized on read.
void write_plan_csv(std::ostream& out, const RunPlan& plan);
std::string plan_csv(const RunPlan& plan);
RunPlan read_plan_csv(std::istream& in);

// Renormalizes a rounded proportion vector so it sums to 1.
MixturePoint renormalized(std::vector<double> proportions);

}  // namespace mixrobust
