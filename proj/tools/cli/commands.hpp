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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "cli/config.hpp"
#include "mixrobust/mixmodel.hpp"

namespace mixrobust::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitNumerical = 4,
};

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<TestScenario> scenario;
};

// Loads the config and applies the command-line overrides.
ExperimentConfig resolve_config(const CommandOptions& options);
std::vector<TestScenario> selected_scenarios(const ExperimentConfig& config,
                                             const CommandOptions& options);

// Output file names inside the output directory.
std::string outcomes_file(TestScenario scenario);
std::string fit_file(Response response, TestScenario scenario);
std::string shap_file(Response response, TestScenario scenario);
std::string shap_values_file(Response response, TestScenario scenario);
std::string grid_file(Response response, TestScenario scenario, std::span<const double> z);
std::string contour_file(Response response, TestScenario scenario, std::span<const double> z);

// Subcommands. Each returns its exit status and throws library errors, which
// run_command maps to exit codes.
int command_design(const ExperimentConfig& config, const CommandOptions& options,
                   std::ostream& log);
// With builtin_only (simulate), external classifiers and CSV pools are
// rejected as configuration errors.
int command_execute(const ExperimentConfig& config, const CommandOptions& options,
                    bool builtin_only, std::ostream& log);
int command_analyze(const ExperimentConfig& config, const CommandOptions& options,
                    std::ostream& log);
int command_shap(const ExperimentConfig& config, const CommandOptions& options,
                 std::ostream& log);
int command_contour(const ExperimentConfig& config, const CommandOptions& options,
                    std::ostream& log);
int command_report(const ExperimentConfig& config, const CommandOptions& options,
                   std::ostream& log);

// Plain-text summary of the fit and SHAP files found in out_dir.
std::string build_report(const std::filesystem::path& out_dir,
                         std::span<const TestScenario> scenarios);

// Entry point shared by the executable and the tests.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mixrobust::cli
