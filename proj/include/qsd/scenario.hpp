// Copyright 2026 The qsd-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsd/errors.hpp"

namespace qsd {

/// Malformed scenario text, with the 1-based position of the failure.
class ScenarioParseError : public Error {
 public:
  ScenarioParseError(const std::string& message, int line, int column)
      : Error(ErrorKind::ParseError, message), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

inline const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds{
      "hellstrom",  "bounds",   "urm-sweep", "chernoff",        "tensor-power",
      "nmixture",   "claim13",  "truncation", "inequality-suite"};
  return kinds;
}

struct RunResult {
  std::string kind;
  std::string output_prefix;
  std::string json;     // report, newline terminated
  std::string csv;      // header plus rows
  std::string summary;  // one line, no newline
};

/// Parses and validates a scenario, runs it and renders the artifacts. The
/// output depends only on the scenario text.
RunResult run_scenario_text(std::string_view text);
RunResult run_scenario_file(const std::string& path);

/// Writes <prefix>.csv and <prefix>.json.
void write_artifacts(const RunResult& result, const std::string& prefix);

/// Machine-readable description of a failure, one line.
std::string error_json(const std::exception& e);

/// 2 for parse errors, 3 for validation errors, 4 for numerical failures.
int exit_code(const std::exception& e);

}  // namespace qsd
