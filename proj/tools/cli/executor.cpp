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
#include "cli/executor.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "mixrobust/csv.hpp"

namespace mixrobust::cli {

std::size_t resolve_jobs(std::optional<std::size_t> flag, std::size_t configured) {
  if (const char* env = std::getenv("MIXROBUST_JOBS"); env != nullptr && *env != '\0') {
    const long long n = csv::to_integer(env, "MIXROBUST_JOBS");
    if (n < 1) throw InvalidArgument("MIXROBUST_JOBS must be a positive integer");
    return static_cast<std::size_t>(n);
  }
  if (flag) {
    if (*flag == 0) throw InvalidArgument("--jobs must be positive");
    return *flag;
  }
  if (configured > 0) return configured;
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::shared_ptr<const DatasetPool>> load_pools(const ExperimentConfig& config) {
  std::vector<std::shared_ptr<const DatasetPool>> pools;
  for (const PoolSpec& spec : config.pools) {
    if (spec.synthetic) {
      pools.push_back(std::make_shared<const DatasetPool>(generate_pool(*spec.synthetic)));
    } else {
      pools.push_back(
          std::make_shared<const DatasetPool>(load_pool_csv(spec.csv, config.design.m)));
    }
    if (pools.back()->num_classes() != config.design.m) {
      throw InvalidArgument("pool " + spec.name + " does not have m classes");
    }
  }
  return pools;
}

RunOutcome execute_run(const ExperimentConfig& config, const DatasetPool& pool,
                       const RunSpec& run) {
  const ClassifierSpec& clf = config.classifiers.at(config.classifier_index(run.covariates));
  ClassifierKind kind = clf.kind;
  if (auto* ext = std::get_if<ExternalKind>(&kind)) {
    const auto root = ext->workdir.empty() ? config.output_dir / "work" : ext->workdir;
    ext->workdir = root / (std::string(to_string(run.scenario)) + "_r" +
                           std::to_string(run.replicate) + "_run" + std::to_string(run.run_id));
  }
  const SampleSplit split = draw_split(pool, run, config.sampling);
  const ScoreMatrix scores = train_and_score(kind, split, pool, clf.hyper);
  const std::vector<int> labels = gather_labels(pool, split.test_indices);
  std::vector<double> aucs;
  for (std::size_t j = 1; j <= config.design.m; ++j) {
    aucs.push_back(auc_ovr(scores, labels, static_cast<int>(j)));
  }
  return make_outcome(run, std::move(aucs));
}

ExecutionResult execute_plan(const ExperimentConfig& config, const RunPlan& plan,
                             std::size_t jobs) {
  const auto pools = load_pools(config);
  const std::size_t n = plan.runs.size();
  std::vector<std::optional<RunOutcome>> outcomes(n);
  std::vector<std::string> errors(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const RunSpec& run = plan.runs[i];
    try {
      const auto& pool = *pools.at(config.pool_index(run.covariates));
      outcomes[i] = execute_run(config, pool, run);
    } catch (const ExternalRunnerError& e) {
      errors[i] = std::string(e.what()) + ": " + e.diagnostics();
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  ExecutionResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (outcomes[i]) {
      result.outcomes.push_back(std::move(*outcomes[i]));
    } else {
      const RunSpec& run = plan.runs[i];
      result.failures.push_back({run.run_id, run.replicate, run.scenario, errors[i]});
    }
  }
  return result;
}

void write_failures_csv(std::ostream& out, std::span<const RunFailure> failures) {
  out << "run_id,replicate,scenario,reason\n";
  for (const RunFailure& f : failures) {
    // Reasons are free text; keep them on one unquoted CSV field.
    std::string reason = f.reason;
    for (char& c : reason) {
      if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
    }
    out << f.run_id << ',' << f.replicate << ',' << to_string(f.scenario) << ',' << reason
        << '\n';
  }
}

}  // namespace mixrobust::cli
