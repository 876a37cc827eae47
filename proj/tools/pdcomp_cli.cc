// Copyright 2026 The pdcomp Authors
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

// Command-line front end: solve, batch and check subcommands.

#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "pdcomp/runner.h"

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual solver for compositional convex problems"};
  app.require_subcommand(1);

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "run one JSON config");
  solve->add_option("config", config_path, "config file")->required();

  std::string batch_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* batch = app.add_subcommand("batch", "run every *.json in a directory");
  batch->add_option("dir", batch_dir, "config directory")->required();
  batch->add_option("-j,--jobs", jobs, "concurrent runs");

  auto* check = app.add_subcommand("check", "run the invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*solve) return pdcomp::SolveCommand(config_path, std::cout, std::cerr);
  if (*batch) return pdcomp::BatchCommand(batch_dir, jobs, std::cout, std::cerr);
  if (*check) return pdcomp::CheckCommand(std::cout);
  return 1;
}
