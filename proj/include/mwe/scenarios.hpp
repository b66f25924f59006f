#pragma once

// Named experiment scenarios shared by the CLI and the acceptance suite.
// Each scenario builds its meshes, runs its checks, and returns a list of
// assertions plus plot-ready CSV tables.

#include <map>
#include <string>
#include <vector>

#include "mwe/config.hpp"

namespace mwe::scenarios {

struct Assertion {
  std::string name;
  double target = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ScenarioResult {
  std::string scenario;
  std::vector<Assertion> assertions;
  std::map<std::string, std::string> csv_files;  // file name -> contents

  bool pass() const;
  std::string to_json() const;
};

// Scenario names, in acceptance order.
const std::vector<std::string>& scenario_names();

// Default scenario set per CLI subcommand.
std::vector<std::string> scenarios_for_subcommand(const std::string& subcommand);

// Runs one scenario; throws std::invalid_argument for unknown names.
ScenarioResult run_scenario(const std::string& name, const config::RunConfig& cfg);

}  // namespace mwe::scenarios
