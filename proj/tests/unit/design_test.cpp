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

#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "mixrobust/error.hpp"

namespace mixrobust {
namespace {

constexpr double kThird = 1.0 / 3.0;

MixturePoint P(double a, double b, double c) { return MixturePoint{{a, b, c}}; }

DesignConfig reference_config() {
  DesignConfig config;
  config.m = 3;
  config.min_prop = 0.01;
  config.replicates = 3;
  config.covariates = {{"z1", {1, 0}}, {"z2", {1, 0}}};
  config.seed = 42;
  return config;
}

void expect_near_point(const MixturePoint& got, const MixturePoint& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  EXPECT_LE(distance_inf(got, want), tol);
}

TEST(SimplexCentroid, ReferenceInstance) {
  const auto points = simplex_centroid(3, 0.01);
  const std::vector<MixturePoint> want = {P(0.98, 0.01, 0.01), P(0.01, 0.98, 0.01),
                                          P(0.01, 0.01, 0.98), P(0.495, 0.495, 0.01),
                                          P(0.495, 0.01, 0.495), P(0.01, 0.495, 0.495),
                                          P(kThird, kThird, kThird)};
  ASSERT_EQ(points.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) expect_near_point(points[i], want[i], 1e-12);
}

TEST(SimplexCentroid, Unconstrained) {
  const auto two = simplex_centroid(2, 0.0);
  ASSERT_EQ(two.size(), 3U);
  EXPECT_EQ(two[0], (MixturePoint{{1.0, 0.0}}));
  EXPECT_EQ(two[1], (MixturePoint{{0.0, 1.0}}));
  EXPECT_EQ(two[2], (MixturePoint{{0.5, 0.5}}));

  const auto three = simplex_centroid(3, 0.0);
  EXPECT_EQ(three.front(), P(1, 0, 0));
  expect_near_point(three.back(), P(kThird, kThird, kThird), 1e-15);
}

TEST(SimplexCentroid, SizeSumAndFloor) {
  for (std::size_t m = 2; m <= 6; ++m) {
    for (double min_prop : {0.0, 0.01, 0.9 / static_cast<double>(m) / 10.0}) {
      const auto points = simplex_centroid(m, min_prop);
      EXPECT_EQ(points.size(), (std::size_t{1} << m) - 1) << "m=" << m;
      std::set<std::vector<double>> distinct;
      for (const auto& p : points) {
        EXPECT_NEAR(p.sum(), 1.0, 1e-12);
        for (double v : p.proportions) EXPECT_GE(v, min_prop - 1e-15);
        distinct.insert(p.proportions);
      }
      EXPECT_EQ(distinct.size(), points.size());
    }
  }
}

TEST(SimplexCentroid, RejectsInfeasibleFloor) {
  EXPECT_THROW(simplex_centroid(3, kThird), InvalidArgument);
  EXPECT_THROW(simplex_centroid(3, 0.5), InvalidArgument);
  EXPECT_THROW(simplex_centroid(1, 0.0), InvalidArgument);
  EXPECT_THROW(simplex_centroid(3, -0.1), InvalidArgument);
}

TEST(CrossArray, RunCounts) {
  DesignConfig config = reference_config();
  const auto points = simplex_centroid(3, 0.01);
  const RunPlan plan = cross_array(points, config);
  ASSERT_EQ(plan.runs.size(), 28U);
  for (std::size_t i = 0; i < plan.runs.size(); ++i) {
    EXPECT_EQ(plan.runs[i].run_id, static_cast<int>(i) + 1);
    EXPECT_FALSE(plan.runs[i].test_mixture.has_value());
  }
  // First factor slowest, mixture points fastest.
  EXPECT_EQ(plan.runs[0].covariates, (std::vector<double>{1, 1}));
  EXPECT_EQ(plan.runs[7].covariates, (std::vector<double>{1, 0}));
  EXPECT_EQ(plan.runs[14].covariates, (std::vector<double>{0, 1}));
  EXPECT_EQ(plan.runs[27].covariates, (std::vector<double>{0, 0}));

  config.covariates = {{"z1", {0, 1}}};
  EXPECT_EQ(cross_array(points, config).runs.size(), 14U);
}

TEST(CrossArray, ReplicatesAndScenarios) {
  const DesignConfig config = reference_config();
  const RunPlan one = make_run_plan(config, std::array{TestScenario::kBalanced});
  EXPECT_EQ(one.runs.size(), 84U);
  const RunPlan all = make_run_plan(config, kAllScenarios);
  ASSERT_EQ(all.runs.size(), 252U);
  std::set<std::tuple<int, int, TestScenario>> keys;
  for (const auto& run : all.runs) {
    keys.insert({run.run_id, run.replicate, run.scenario});
    ASSERT_TRUE(run.test_mixture.has_value());
    EXPECT_EQ(run.seed, run_instance_seed(config.seed, run.run_id, run.replicate, run.scenario));
  }
  EXPECT_EQ(keys.size(), 252U);
  // Scenario-major, then replicate, then run id.
  EXPECT_EQ(all.runs[0].scenario, TestScenario::kBalanced);
  EXPECT_EQ(all.runs[28].replicate, 2);
  EXPECT_EQ(all.runs[84].scenario, TestScenario::kConsistent);
}

TEST(Scenario, ReferenceMappings) {
  Rng rng(7);
  const double f = 0.01;
  const std::vector<std::pair<MixturePoint, MixturePoint>> reverse = {
      {P(0.01, 0.01, 0.98), P(0.495, 0.495, 0.01)}, {P(0.01, 0.98, 0.01), P(0.495, 0.01, 0.495)},
      {P(0.98, 0.01, 0.01), P(0.01, 0.495, 0.495)}, {P(0.01, 0.495, 0.495), P(0.98, 0.01, 0.01)},
      {P(0.495, 0.01, 0.495), P(0.01, 0.98, 0.01)}, {P(0.495, 0.495, 0.01), P(0.01, 0.01, 0.98)},
  };
  for (const auto& [train, test] : reverse) {
    expect_near_point(scenario_test_proportions(train, TestScenario::kReverse, f, rng), test,
                      1e-12);
    expect_near_point(scenario_test_proportions(train, TestScenario::kConsistent, f, rng),
                      train, 0.0);
    expect_near_point(scenario_test_proportions(train, TestScenario::kBalanced, f, rng),
                      P(kThird, kThird, kThird), 1e-15);
  }
}

TEST(Scenario, ReverseIsAnInvolutionOffTheCentroid) {
  Rng rng(1);
  for (std::size_t m = 2; m <= 5; ++m) {
    const auto points = simplex_centroid(m, 0.01);
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const auto once = scenario_test_proportions(points[i], TestScenario::kReverse, 0.01, rng);
      const auto twice = scenario_test_proportions(once, TestScenario::kReverse, 0.01, rng);
      EXPECT_LE(distance_inf(twice, points[i]), 1e-12);
    }
  }
}

TEST(Scenario, CentroidDrawsOnlyPureDominantPoints) {
  const MixturePoint centroid = simplex_centroid(3, 0.01).back();
  const std::set<std::vector<double>> allowed = {
      {0.01, 0.01, 0.98}, {0.01, 0.98, 0.01}, {0.98, 0.01, 0.01}};
  std::map<std::vector<double>, int> seen;
  Rng rng(99);
  for (int i = 0; i < 3000; ++i) {
    auto test = scenario_test_proportions(centroid, TestScenario::kReverse, 0.01, rng);
    for (double& v : test.proportions) v = std::round(v * 1e9) / 1e9;
    ASSERT_TRUE(allowed.count(test.proportions)) << test[0] << ' ' << test[1] << ' ' << test[2];
    ++seen[test.proportions];
  }
  ASSERT_EQ(seen.size(), 3U);
  for (const auto& [point, count] : seen) EXPECT_NEAR(count, 1000, 150);
}

TEST(Scenario, RankReversalFallback) {
  Rng rng(3);
  const auto got = scenario_test_proportions(P(0.2, 0.5, 0.3), TestScenario::kReverse, 0.0, rng);
  // Largest and smallest swap; the middle value stays put.
  expect_near_point(got, P(0.5, 0.2, 0.3), 1e-15);
}

TEST(Seeds, ReverseChoiceIsReproducible) {
  const DesignConfig config = reference_config();
  const RunPlan a = make_run_plan(config, kAllScenarios);
  const RunPlan b = make_run_plan(config, std::array{TestScenario::kReverse});
  // The draw depends only on the key, not on which other scenarios are planned.
  std::map<std::pair<int, int>, MixturePoint> first;
  for (const auto& run : a.runs) {
    if (run.scenario == TestScenario::kReverse) first[{run.run_id, run.replicate}] = *run.test_mixture;
  }
  for (const auto& run : b.runs) EXPECT_EQ(first.at({run.run_id, run.replicate}), *run.test_mixture);

  std::set<std::uint64_t> seeds;
  for (const auto& run : a.runs) seeds.insert(run.seed);
  EXPECT_EQ(seeds.size(), a.runs.size());
}

TEST(PlanCsv, HeaderAndRoundTrip) {
  const DesignConfig config = reference_config();
  const RunPlan plan = make_run_plan(config, kAllScenarios);
  const std::string text = plan_csv(plan);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "run_id,scenario,replicate,x1,x2,x3,z1,z2,test_x1,test_x2,test_x3,seed");
  EXPECT_NE(text.find("0.333333,0.333333,0.333333"), std::string::npos);

  std::istringstream in(text);
  const RunPlan back = read_plan_csv(in);
  ASSERT_EQ(back.runs.size(), plan.runs.size());
  EXPECT_EQ(back.config.m, 3U);
  EXPECT_EQ(back.config.h(), 2U);
  EXPECT_NEAR(back.config.min_prop, 0.01, 1e-12);
  for (std::size_t i = 0; i < plan.runs.size(); ++i) {
    const auto& r = back.runs[i];
    EXPECT_EQ(r.run_id, plan.runs[i].run_id);
    EXPECT_EQ(r.scenario, plan.runs[i].scenario);
    EXPECT_EQ(r.seed, plan.runs[i].seed);
    EXPECT_NEAR(r.train_mixture.sum(), 1.0, 1e-6);
    EXPECT_LE(distance_inf(r.train_mixture, plan.runs[i].train_mixture), 1e-6);
    EXPECT_LE(distance_inf(*r.test_mixture, *plan.runs[i].test_mixture), 1e-6);
  }
  EXPECT_EQ(plan_csv(back), text);
}

TEST(ScenarioNames, RoundTrip) {
  for (TestScenario s : kAllScenarios) EXPECT_EQ(parse_scenario(to_string(s)), s);
  EXPECT_THROW(parse_scenario("shifted"), InvalidArgument);
}

}  // namespace
}  // namespace mixrobust
