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
#include "cli/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli/executor.hpp"
#include "mixrobust/contour.hpp"
#include "mixrobust/io.hpp"
#include "mixrobust/shap.hpp"

namespace mixrobust::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::array<Response, 2> kResponses = {Response::kMeanAuc, Response::kLogSd};

std::string stem(Response response, TestScenario scenario) {
  return std::string(to_string(response)) + "_" + std::string(to_string(scenario));
}

json read_json(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

OutcomeTable read_outcomes(const fs::path& path, TestScenario expected) {
  std::ifstream in(path);
  if (!in) throw IoError("missing outcomes file " + path.string() + " (run simulate or run first)");
  OutcomeTable table = read_outcomes_csv(in);
  for (const RunOutcome& row : table.rows) {
    if (row.scenario != table.rows.front().scenario) {
      throw IoError(path.string() + " mixes scenarios; analyze one scenario per file");
    }
    if (row.scenario != expected) {
      throw IoError(path.string() + " holds " + std::string(to_string(row.scenario)) +
                    " outcomes, expected " + std::string(to_string(expected)));
    }
  }
  return table;
}

MixtureModelFit read_fit(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing fit report " + path.string() + " (run analyze first)");
  return fit_from_report_json(read_json(path));
}

// Full factorial of covariate levels, first factor slowest.
std::vector<std::vector<double>> covariate_combinations(const DesignConfig& design) {
  std::vector<std::vector<double>> combos{{}};
  for (const auto& factor : design.covariates) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : combos) {
      for (double level : factor.levels) {
        next.push_back(prefix);
        next.back().push_back(level);
      }
    }
    combos = std::move(next);
  }
  return combos;
}

json metadata_json(const ExperimentConfig& config, std::span<const TestScenario> scenarios,
                   const RunPlan& plan, const ExecutionResult& result) {
  json meta;
  meta["master_seed"] = config.master_seed;
  meta["m"] = config.design.m;
  meta["min_prop"] = config.design.min_prop;
  meta["replicates"] = config.design.replicates;
  json scen = json::array();
  for (TestScenario s : scenarios) scen.push_back(to_string(s));
  meta["scenarios"] = scen;
  meta["sampling"] = {{"train_frac", config.sampling.train_frac},
                      {"test_frac", config.sampling.test_frac}};
  json covariates = json::array();
  for (std::size_t k = 0; k < config.design.h(); ++k) {
    const char* role = config.roles[k] == CovariateRole::kClassifier ? "classifier"
                       : config.roles[k] == CovariateRole::kPool     ? "pool"
                                                                     : "none";
    covariates.push_back({{"name", config.design.covariates[k].name},
                          {"role", role},
                          {"levels", config.design.covariates[k].levels}});
  }
  meta["covariates"] = covariates;
  json classifiers = json::array();
  for (const ClassifierSpec& c : config.classifiers) {
    json entry = {{"kind", classifier_name(c.kind)}, {"hyperparameters", c.hyper}};
    if (const auto* ext = std::get_if<ExternalKind>(&c.kind)) entry["command"] = ext->command;
    classifiers.push_back(entry);
  }
  meta["classifiers"] = classifiers;
  json pools = json::array();
  for (const PoolSpec& p : config.pools) {
    json entry = {{"name", p.name}};
    if (p.synthetic) {
      const auto& s = *p.synthetic;
      entry["synthetic"] = {{"d", s.d},
                            {"n_per_class", s.n_per_class},
                            {"class_means", s.class_means},
                            {"noise_scale", s.noise_scale},
                            {"separability_boost", s.separability_boost},
                            {"seed", s.seed}};
    } else {
      entry["csv"] = p.csv.lexically_relative(config.base_dir).generic_string();
    }
    pools.push_back(entry);
  }
  meta["pools"] = pools;
  meta["run_instances"] = plan.runs.size();
  meta["completed"] = result.outcomes.size();
  meta["failed"] = result.failures.size();
  return meta;
}

void add_common_options(CLI::App* sub, CommandOptions& options, std::string& scenario) {
  sub->add_option("--config", options.config, "Experiment config (JSON)")->required();
  sub->add_option("--out", options.out, "Output directory (overrides the config)");
  sub->add_option("--seed", options.seed, "Master seed (overrides the config)");
  sub->add_option("--jobs", options.jobs, "Worker threads for simulate/run")
      ->check(CLI::PositiveNumber);
  sub->add_option("--scenario", scenario, "Restrict to one scenario")
      ->check(CLI::IsMember({"balanced", "consistent", "reverse"}));
}

}  // namespace

std::string outcomes_file(TestScenario scenario) {
  return "outcomes_" + std::string(to_string(scenario)) + ".csv";
}
std::string fit_file(Response response, TestScenario scenario) {
  return "fit_" + stem(response, scenario) + ".json";
}
std::string shap_file(Response response, TestScenario scenario) {
  return "shap_" + stem(response, scenario) + ".json";
}
std::string shap_values_file(Response response, TestScenario scenario) {
  return "shap_" + stem(response, scenario) + "_values.csv";
}
std::string grid_file(Response response, TestScenario scenario, std::span<const double> z) {
  return "grid_" + stem(response, scenario) + "_" + covariate_tag(z) + ".csv";
}
std::string contour_file(Response response, TestScenario scenario, std::span<const double> z) {
  return "contour_" + stem(response, scenario) + "_" + covariate_tag(z) + ".svg";
}

ExperimentConfig resolve_config(const CommandOptions& options) {
  ExperimentConfig config = load_config(options.config);
  if (options.out) config.output_dir = *options.out;
  if (options.seed) {
    config.master_seed = *options.seed;
    assign_pool_seeds(config);
  }
  config.design.seed = config.master_seed;
  return config;
}

std::vector<TestScenario> selected_scenarios(const ExperimentConfig& config,
                                             const CommandOptions& options) {
  if (options.scenario) return {*options.scenario};
  return config.scenarios;
}

int command_design(const ExperimentConfig& config, const CommandOptions& options,
                   std::ostream& log) {
  const auto scenarios = selected_scenarios(config, options);
  const RunPlan plan = make_run_plan(config.design, scenarios);
  write_file_atomic(config.output_dir / "plan.csv", plan_csv(plan));
  log << "wrote " << plan.runs.size() << " run instances to "
      << (config.output_dir / "plan.csv").string() << '\n';
  return kExitOk;
}

int command_execute(const ExperimentConfig& config, const CommandOptions& options,
                    bool builtin_only, std::ostream& log) {
  if (builtin_only) {
    for (const ClassifierSpec& c : config.classifiers) {
      if (std::holds_alternative<ExternalKind>(c.kind)) {
        throw ConfigError("simulate runs built-in classifiers only; use run for external ones");
      }
    }
    for (const PoolSpec& p : config.pools) {
      if (!p.synthetic) throw ConfigError("simulate needs synthetic pools; use run for CSV pools");
    }
  }
  const auto scenarios = selected_scenarios(config, options);
  const RunPlan plan = make_run_plan(config.design, scenarios);
  const std::size_t jobs = resolve_jobs(options.jobs, config.jobs);
  const ExecutionResult result = execute_plan(config, plan, jobs);

  write_file_atomic(config.output_dir / "plan.csv", plan_csv(plan));
  for (TestScenario s : scenarios) {
    std::vector<RunOutcome> rows;
    for (const RunOutcome& o : result.outcomes) {
      if (o.scenario == s) rows.push_back(o);
    }
    write_file_atomic(config.output_dir / outcomes_file(s),
                      outcomes_csv(rows, config.design.m, config.design.h()));
  }
  std::ostringstream failures;
  write_failures_csv(failures, result.failures);
  write_file_atomic(config.output_dir / "failures.csv", failures.str());
  write_file_atomic(config.output_dir / "run_metadata.json",
                    metadata_json(config, scenarios, plan, result).dump(2) + "\n");
  log << result.outcomes.size() << " of " << plan.runs.size() << " run instances completed\n";
  if (!result.failures.empty()) {
    log << result.failures.size() << " failed; see "
        << (config.output_dir / "failures.csv").string() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int command_analyze(const ExperimentConfig& config, const CommandOptions& options,
                    std::ostream& log) {
  for (TestScenario s : selected_scenarios(config, options)) {
    const OutcomeTable table = read_outcomes(config.output_dir / outcomes_file(s), s);
    for (Response r : kResponses) {
      const AnalysisDataset data = analysis_dataset(table.rows, table.m, table.h, r);
      const MixtureModelFit fit = fit_ols(build_design_matrix(data), response_vector(data));
      const auto path = config.output_dir / fit_file(r, s);
      write_file_atomic(path, fit_report_json(fit, to_string(s), to_string(r)).dump(2) + "\n");
      log << "wrote " << path.string() << '\n';
    }
  }
  return kExitOk;
}

int command_shap(const ExperimentConfig& config, const CommandOptions& options,
                 std::ostream& log) {
  for (TestScenario s : selected_scenarios(config, options)) {
    const OutcomeTable table = read_outcomes(config.output_dir / outcomes_file(s), s);
    for (Response r : kResponses) {
      const MixtureModelFit fit = read_fit(config.output_dir / fit_file(r, s));
      const AnalysisDataset data = analysis_dataset(table.rows, table.m, table.h, r);
      const ShapReport report = shap_report(fit, build_design_matrix(data));
      write_file_atomic(config.output_dir / shap_file(r, s),
                        shap_report_json(report, to_string(s), to_string(r)).dump(2) + "\n");
      std::ostringstream values;
      write_shap_values_csv(values, report);
      write_file_atomic(config.output_dir / shap_values_file(r, s), values.str());
      log << "wrote " << (config.output_dir / shap_file(r, s)).string() << '\n';
    }
  }
  return kExitOk;
}

int command_contour(const ExperimentConfig& config, const CommandOptions& options,
                    std::ostream& log) {
  const auto combos = covariate_combinations(config.design);
  for (TestScenario s : selected_scenarios(config, options)) {
    for (Response r : kResponses) {
      const MixtureModelFit fit = read_fit(config.output_dir / fit_file(r, s));
      if (fit.m != config.design.m || fit.h != config.design.h()) {
        throw IoError(fit_file(r, s) + " does not match the configured design");
      }
      TernaryGrid grid =
          make_grid(fit.m, config.contour_resolution, config.design.min_prop);
      grid.response = to_string(r);
      grid.scenario = to_string(s);
      for (const auto& z : combos) {
        const TernaryGrid values = grid_predict(fit, grid, z);
        std::ostringstream csv_out;
        write_grid_csv(csv_out, values);
        write_file_atomic(config.output_dir / grid_file(r, s, z), csv_out.str());
        if (fit.m == 3) {
          write_file_atomic(config.output_dir / contour_file(r, s, z),
                            render_ternary(values, config.contour_levels));
        }
      }
      log << "wrote " << combos.size() << " surfaces for " << stem(r, s) << '\n';
    }
  }
  return kExitOk;
}

int command_report(const ExperimentConfig& config, const CommandOptions& options,
                   std::ostream& log) {
  const auto scenarios = selected_scenarios(config, options);
  const std::string text = build_report(config.output_dir, scenarios);
  write_file_atomic(config.output_dir / "report.txt", text);
  log << "wrote " << (config.output_dir / "report.txt").string() << '\n';
  return kExitOk;
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixture-design experiments on classifier robustness", "mixrobust"};
  app.require_subcommand(1);
  CommandOptions options;
  std::string scenario;
  const std::vector<std::pair<const char*, const char*>> subcommands = {
      {"design", "Write the run plan"},
      {"simulate", "Run built-in classifiers on synthetic pools"},
      {"run", "Run every configured classifier, external ones included"},
      {"analyze", "Fit the mixture model per scenario and response"},
      {"shap", "Shapley importances of the fitted terms"},
      {"contour", "Ternary prediction grids and contour plots"},
      {"report", "Plain-text summary of fits and importances"},
  };
  for (const auto& [name, help] : subcommands) {
    add_common_options(app.add_subcommand(name, help), options, scenario);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mixrobust: " << e.what() << '\n';
    return kExitUsage;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (!scenario.empty()) options.scenario = parse_scenario(scenario);
    ExperimentConfig config = resolve_config(options);
    if (name == "design") return command_design(config, options, out);
    if (name == "simulate") return command_execute(config, options, true, out);
    if (name == "run") return command_execute(config, options, false, out);
    if (name == "analyze") return command_analyze(config, options, out);
    if (name == "shap") return command_shap(config, options, out);
    if (name == "contour") return command_contour(config, options, out);
    return command_report(config, options, out);
  } catch (const ConfigError& e) {
    err << "mixrobust: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "mixrobust: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "mixrobust: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvalidArgument& e) {
    err << "mixrobust: invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "mixrobust: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "mixrobust: I/O error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace mixrobust::cli
