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
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mixrobust/classifiers.hpp"
#include "mixrobust/csv.hpp"
#include "mixrobust/error.hpp"

namespace mixrobust {
namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

void write_split_file(const std::filesystem::path& path, const DatasetPool& pool,
                      std::span<const std::size_t> rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_pool_rows(out, pool, rows);
}

}  // namespace

ScoreMatrix run_external(const ExternalKind& kind, const SampleSplit& split,
                         const DatasetPool& pool) {
  if (kind.command.empty()) throw InvalidArgument("external classifier has no command");
  std::error_code ec;
  std::filesystem::create_directories(kind.workdir, ec);
  if (ec) throw IoError("cannot create workdir " + kind.workdir.string());
  const auto scores_path = kind.workdir / "scores.csv";
  std::filesystem::remove(scores_path, ec);

  write_split_file(kind.workdir / "train.csv", pool, split.train_indices);
  write_split_file(kind.workdir / "test.csv", pool, split.test_indices);

  const std::string command = kind.command + " " + shell_quote(kind.workdir.string()) + " 2>&1";
  std::FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) throw ExternalRunnerError("cannot launch: " + kind.command, "");
  std::string diagnostics;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) diagnostics.append(buffer, got);
  const int status = ::pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    throw ExternalRunnerError(
        "external command '" + kind.command + "' failed with status " + std::to_string(code),
        diagnostics);
  }

  csv::Table table;
  try {
    table = csv::read_file(scores_path);
  } catch (const IoError& e) {
    throw ExternalRunnerError(std::string("malformed score file: ") + e.what(), diagnostics);
  }
  const std::size_t m = pool.num_classes();
  if (table.header.size() != m) {
    throw ExternalRunnerError("score file must have " + std::to_string(m) + " columns",
                              diagnostics);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (table.header[j] != "score_" + std::to_string(j + 1)) {
      throw ExternalRunnerError("score file header must be score_1..score_m", diagnostics);
    }
  }
  if (table.rows.size() != split.test_indices.size()) {
    throw ExternalRunnerError("score file has " + std::to_string(table.rows.size()) +
                                  " rows, expected " + std::to_string(split.test_indices.size()),
                              diagnostics);
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(m));
  try {
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            csv::to_double(table.rows[i][j], "scores.csv");
      }
    }
    ScoreMatrix scores(std::move(values));
    scores.validate(1e-6);
    return scores;
  } catch (const Error& e) {
    throw ExternalRunnerError(std::string("malformed score file: ") + e.what(), diagnostics);
  }
}

}  // namespace mixrobust
