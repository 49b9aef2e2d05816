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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qsd/parallel.hpp"
#include "qsd/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qsd-lab: minimum-error state discrimination scenarios"};
  std::string path;
  std::string out;
  unsigned threads = 0;
  app.add_option("scenario", path, "Scenario JSON file")->required();
  app.add_option("--out", out, "Output prefix (overrides the scenario's 'output')");
  app.add_option("--threads", threads, "Worker cap for data-parallel loops (0 = all cores)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  qsd::set_thread_limit(threads);
  try {
    const qsd::RunResult r = qsd::run_scenario_file(path);
    qsd::write_artifacts(r, out.empty() ? r.output_prefix : out);
    std::cout << r.summary << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << qsd::error_json(e) << "\n";
    return qsd::exit_code(e);
  }
}
