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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "mixrobust/metrics.hpp"

namespace mixrobust::cli {

struct RunFailure {
  int run_id = 0;
  int replicate = 1;
  TestScenario scenario = TestScenario::kBalanced;
  std::string reason;
};

// Both lists follow plan order regardless of completion order.
struct ExecutionResult {
  std::vector<RunOutcome> outcomes;
  std::vector<RunFailure> failures;
};

// Worker count: MIXROBUST_JOBS, then the flag, then the config, then the
// available parallelism.
std::size_t resolve_jobs(std::optional<std::size_t> flag, std::size_t configured);

// Calls body(i) for i in [0, n) on up to jobs threads. The first exception
// escaping body is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

// One pool per config.pools entry.
std::vector<std::shared_ptr<const DatasetPool>> load_pools(const ExperimentConfig& config);

// Split, train, score and summarize one run instance.
RunOutcome execute_run(const ExperimentConfig& config, const DatasetPool& pool,
                       const RunSpec& run);

// Runs every instance of the plan. Library errors inside a run become
// failures; anything else propagates.
ExecutionResult execute_plan(const ExperimentConfig& config, const RunPlan& plan,
                             std::size_t jobs);

void write_failures_csv(std::ostream& out, std::span<const RunFailure> failures);

}  // namespace mixrobust::cli
