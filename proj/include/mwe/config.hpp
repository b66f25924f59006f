#pragma once

// Run configuration: a flat, sectioned key = value text format with typed
// values.  Unknown sections or keys are rejected with a diagnostic naming
// the field.  Every numeric tolerance used by the scenarios lives here.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwe::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double kernel_match_rel = 0.02;
  double horizontal_identity_abs = 1e-12;
  double semigroup_rel = 1e-8;
  double stein_abs = 1e-10;
  double slope_tol_super = 0.15;         // p >= n* scaling exponents
  double slope_tol_sub = 0.10;           // p < n* flatness
  double keylemma_exponent_tol = 0.2;
  double envelope_spread_max = 5.0;
  double weak11_factor = 3.0;
  double translation_factor = 2.0;
  double growth_min = 1.5;               // t-range growth witnesses
  double fs_stable_factor = 2.0;
  double fs_growth_min = 2.0;
  double square_stable_factor = 2.0;
  double rbound_spread_max = 2.0;
  double doubling_bounded_max = 24.0;
  double doubling_stable_factor = 1.25;
  double doubling_growth_min = 1.5;
};

struct RunConfig {
  // [run]
  std::string scenario;
  uint64_t seed = 42;
  std::string out = "out";
  int threads = 1;
  // [mesh] -- zero/empty means "scenario default"
  std::vector<int> dims;
  double r_min = 0.0;
  double r_max = 0.0;
  int cells = 0;
  int center_size = 0;
  int cross_modes = 0;
  std::string grid;  // "geometric" | "uniform"
  // [params]
  int m = 0;
  std::vector<double> p_grid;
  double t_min = 0.0;
  double t_max = 0.0;
  double t_ratio = 0.0;
  std::vector<double> k_grid;
  int trials = 0;
  int t_count = 0;
  // [tolerances]
  Tolerances tol;
};

// Parses and validates; throws ConfigError naming the offending field.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

}  // namespace mwe::config
