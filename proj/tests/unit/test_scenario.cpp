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

#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "qsd/errors.hpp"
#include "qsd/parallel.hpp"
#include "qsd/scenario.hpp"

using namespace qsd;

namespace {

int exit_of(std::string_view text) {
  try {
    run_scenario_text(text);
  } catch (const std::exception& e) {
    return exit_code(e);
  }
  return 0;
}

const char* kQubit = R"({
  "kind": "urm-sweep",
  "model": {"type": "qubit"},
  "quantity": "hellstrom",
  "grid": {"stop": 31.41592653589793, "points": 401}
})";

}  // namespace

TEST_CASE("qubit sweep CSV follows the closed form") {
  const RunResult r = run_scenario_text(kQubit);
  CHECK(r.kind == "urm-sweep");
  CHECK(r.output_prefix == "qsd_urm-sweep");
  std::istringstream in(r.csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,hellstrom");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double t = std::stod(line.substr(0, comma));
    const double e = std::stod(line.substr(comma + 1));
    CHECK(std::abs(e - (0.5 - 0.5 * std::abs(std::sin(t)))) <= 1e-10);
    ++rows;
  }
  CHECK(rows == 401);
  CHECK(r.summary.find("not-fully-solvable-evidence") != std::string::npos);
}

TEST_CASE("outputs are identical across runs and thread counts") {
  const std::string text = R"({"kind": "bounds", "seed": 9, "ensemble": {"random": {"dim": 3, "members": 4}}})";
  set_thread_limit(1);
  const RunResult a = run_scenario_text(text);
  set_thread_limit(4);
  const RunResult b = run_scenario_text(text);
  set_thread_limit(0);
  CHECK(a.json == b.json);
  CHECK(a.csv == b.csv);
  const std::string other = R"({"kind": "bounds", "seed": 10, "ensemble": {"random": {"dim": 3, "members": 4}}})";
  CHECK(run_scenario_text(other).json != a.json);
}

TEST_CASE("malformed JSON reports line and column") {
  const std::string text = "{\n  \"kind\": \"bounds\",\n  \"seed\": ,\n}";
  try {
    run_scenario_text(text);
    FAIL("expected a parse error");
  } catch (const ScenarioParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 11);
    CHECK(exit_code(e) == 2);
    const std::string j = error_json(e);
    CHECK(j.find("\"line\":3") != std::string::npos);
    CHECK(j.find("\"error\":\"ParseError\"") != std::string::npos);
  }
}

TEST_CASE("validation failures exit with 3") {
  CHECK(exit_of(R"({"kind": "nope"})") == 3);
  CHECK(exit_of(R"({"seed": 1})") == 3);
  CHECK(exit_of(R"([1, 2])") == 3);
  CHECK(exit_of(R"({"kind": "bounds", "ensemble": {"random": {"dim": 2}}, "typo": 1})") == 3);
  CHECK(exit_of(R"({"kind": "hellstrom", "ensemble": {"weights": [0.5, 0.5],
      "states": [{"ket": [1, 0]}, {"ket": [1, 1]}]}})") == 3);
  CHECK(exit_of(R"({"kind": "hellstrom", "ensemble": {"weights": [0.2, 0.2],
      "states": [{"ket": [1, 0]}, {"ket": [0, 1]}]}})") == 3);
  CHECK(exit_of(R"({"kind": "claim13", "c": 0.5})") == 3);
  CHECK(exit_of(R"({"kind": "urm-sweep", "model": {"type": "qubit", "rates": [1, 1]},
      "grid": {"stop": 1}})") == 3);
  CHECK(exit_of(R"({"kind": "nmixture", "model": {"type": "ac", "dim": 8},
      "density": {"type": "uniform", "support": [0, 1]},
      "partition": [[0, 0.6], [0.4, 1]], "times": [1]})") == 3);
  CHECK(exit_of(R"({"kind": "truncation", "geometric": {"dim": 4}, "ranks": [5]})") == 3);
}

TEST_CASE("numerical failures exit with 4") {
  const Error e(ErrorKind::SearchFailed, "no window");
  CHECK(exit_code(e) == 4);
  CHECK(error_json(e).find("\"error\":\"NumericalFailure\"") != std::string::npos);
  CHECK(exit_code(std::runtime_error("other")) == 4);
}

TEST_CASE("every kind runs on a small instance") {
  const char* cases[] = {
      R"({"kind": "hellstrom", "ensemble": {"weights": [0.5, 0.5], "states": [{"ket": [1, 0]}, {"ket": [0, 1]}]}})",
      R"({"kind": "chernoff", "ensemble": {"random": {"dim": 2, "members": 3}}})",
      R"({"kind": "tensor-power", "ensemble": {"weights": [0.5, 0.5], "states": [{"ket": [1, 0]}, {"ket": [[0.6, 0], [0, 0.8]]}]}, "n_max": 5})",
      R"({"kind": "nmixture", "model": {"type": "custom", "generator": [[1, [0, 1]], [[0, -1], -1]], "state": {"ket": [1, 0]}},
          "density": {"type": "raised-cosine", "support": [0, 2]}, "nodes_per_cell": 16,
          "partition": [[0, 1], [1, 2]], "times": [0.5], "bounds": true})",
      R"({"kind": "claim13", "model": {"type": "ac", "dim": 64}, "nodes_per_component": 32, "scan_points": 50, "direct_checks": 1})",
      R"({"kind": "truncation", "study": "kb", "states": [{"random": {"dim": 4}}, {"random": {"dim": 4, "rank": 2}}], "ranks": [1, 4]})",
      R"({"kind": "inequality-suite", "trials": 4})",
      R"({"kind": "urm-sweep", "model": {"type": "custom", "generator": [[1, 0], [0, -1]], "rates": [0, 1],
          "states": [{"ket": [0.6, 0.8]}, {"matrix": [[0.5, 0], [0, 0.5]]}]}, "quantity": "montanaro", "grid": {"stop": 5, "points": 11}})",
  };
  for (const char* text : cases) {
    CAPTURE(text);
    const RunResult r = run_scenario_text(text);
    CHECK(!r.json.empty());
    CHECK(r.csv.find('\n') != std::string::npos);
    CHECK(r.summary.find(r.kind) == 0);
  }
}
