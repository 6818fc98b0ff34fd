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
#include <stdexcept>
#include <string>
#include <vector>

namespace mixrobust {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// File missing, unreadable, or not in the expected format.
class IoError : public Error {
 public:
  using Error::Error;
};

// Not enough unused points in a class to draw the requested test sample.
class SamplingError : public Error {
 public:
  SamplingError(int class_id, std::size_t shortfall, const std::string& what)
      : Error(what), class_id_(class_id), shortfall_(shortfall) {}

  int class_id() const noexcept { return class_id_; }
  std::size_t shortfall() const noexcept { return shortfall_; }

 private:
  int class_id_;
  std::size_t shortfall_;
};

// Rank deficiency, degenerate statistics and similar numerical failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public NumericalError {
 public:
  RankDeficientError(std::vector<std::string> dependent_columns,
                     const std::string& what)
      : NumericalError(what), dependent_columns_(std::move(dependent_columns)) {}

  const std::vector<std::string>& dependent_columns() const noexcept {
    return dependent_columns_;
  }

 private:
  std::vector<std::string> dependent_columns_;
};

// An external trainer exited with an error or produced an invalid score file.
class ExternalRunnerError : public Error {
 public:
  ExternalRunnerError(const std::string& what, std::string diagnostics)
      : Error(what), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace mixrobust
