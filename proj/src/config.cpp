#include "mwe/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace mwe::config {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': cannot parse '" + v + "' as a number");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse(key, item));
  }
  if (out.empty()) throw ConfigError("field '" + key + "': empty list");
  return out;
}

void validate(const RunConfig& cfg) {
  for (double p : cfg.p_grid) {
    if (!(p >= 1.0)) {
      throw ConfigError("field 'p_grid': p values must satisfy p >= 1");
    }
  }
  for (int n : cfg.dims) {
    if (n < 1) throw ConfigError("field 'dims': dimensions must be positive");
  }
  if (cfg.r_min < 0.0) throw ConfigError("field 'r_min': must be positive");
  if (cfg.r_max != 0.0 && cfg.r_min != 0.0 && cfg.r_max <= cfg.r_min) {
    throw ConfigError("field 'r_max': must exceed r_min");
  }
  if (cfg.cells != 0 && cfg.cells < 16) {
    throw ConfigError("field 'cells': need at least 16 cells");
  }
  if (cfg.threads < 1) throw ConfigError("field 'threads': must be >= 1");
  if (cfg.t_ratio != 0.0 && !(cfg.t_ratio > 1.0)) {
    throw ConfigError("field 't_ratio': must exceed 1");
  }
  if (cfg.t_min != 0.0 && cfg.t_max != 0.0 && !(cfg.t_max > cfg.t_min)) {
    throw ConfigError("field 't_max': must exceed t_min");
  }
  for (double k : cfg.k_grid) {
    if (!(k > 0.0) || k > 1.0) {
      throw ConfigError("field 'k_grid': k values must lie in (0, 1]");
    }
  }
  if (!cfg.grid.empty() && cfg.grid != "geometric" && cfg.grid != "uniform") {
    throw ConfigError("field 'grid': expected 'geometric' or 'uniform'");
  }
  if (cfg.m < 0 || cfg.m > 3) throw ConfigError("field 'm': must be in {1,2,3}");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
  static const std::map<std::pair<std::string, std::string>, Setter> table = {
      {{"run", "scenario"}, [](RunConfig& c, const std::string&, const std::string& v) { c.scenario = v; }},
      {{"run", "seed"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = static_cast<uint64_t>(parse_int(k, v)); }},
      {{"run", "out"}, [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }},
      {{"run", "threads"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.threads = static_cast<int>(parse_int(k, v)); }},
      {{"mesh", "dims"}, [](RunConfig& c, const std::string& k, const std::string& v) {
         c.dims = parse_list<int>(k, v, [](const std::string& kk, const std::string& vv) {
           return static_cast<int>(parse_int(kk, vv));
         });
       }},
      {{"mesh", "r_min"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.r_min = parse_double(k, v); }},
      {{"mesh", "r_max"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.r_max = parse_double(k, v); }},
      {{"mesh", "cells"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.cells = static_cast<int>(parse_int(k, v)); }},
      {{"mesh", "center_size"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.center_size = static_cast<int>(parse_int(k, v)); }},
      {{"mesh", "cross_modes"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.cross_modes = static_cast<int>(parse_int(k, v)); }},
      {{"mesh", "grid"}, [](RunConfig& c, const std::string&, const std::string& v) { c.grid = v; }},
      {{"params", "m"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.m = static_cast<int>(parse_int(k, v)); }},
      {{"params", "p_grid"}, [](RunConfig& c, const std::string& k, const std::string& v) {
         c.p_grid = parse_list<double>(k, v, parse_double);
       }},
      {{"params", "t_min"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.t_min = parse_double(k, v); }},
      {{"params", "t_max"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.t_max = parse_double(k, v); }},
      {{"params", "t_ratio"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.t_ratio = parse_double(k, v); }},
      {{"params", "k_grid"}, [](RunConfig& c, const std::string& k, const std::string& v) {
         c.k_grid = parse_list<double>(k, v, parse_double);
       }},
      {{"params", "trials"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.trials = static_cast<int>(parse_int(k, v)); }},
      {{"params", "t_count"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.t_count = static_cast<int>(parse_int(k, v)); }},
      {{"tolerances", "kernel_match_rel"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.kernel_match_rel = parse_double(k, v); }},
      {{"tolerances", "horizontal_identity_abs"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.horizontal_identity_abs = parse_double(k, v); }},
      {{"tolerances", "semigroup_rel"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.semigroup_rel = parse_double(k, v); }},
      {{"tolerances", "stein_abs"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.stein_abs = parse_double(k, v); }},
      {{"tolerances", "slope_tol_super"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.slope_tol_super = parse_double(k, v); }},
      {{"tolerances", "slope_tol_sub"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.slope_tol_sub = parse_double(k, v); }},
      {{"tolerances", "keylemma_exponent_tol"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.keylemma_exponent_tol = parse_double(k, v); }},
      {{"tolerances", "envelope_spread_max"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.envelope_spread_max = parse_double(k, v); }},
      {{"tolerances", "weak11_factor"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.weak11_factor = parse_double(k, v); }},
      {{"tolerances", "translation_factor"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.translation_factor = parse_double(k, v); }},
      {{"tolerances", "growth_min"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.growth_min = parse_double(k, v); }},
      {{"tolerances", "fs_stable_factor"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.fs_stable_factor = parse_double(k, v); }},
      {{"tolerances", "fs_growth_min"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.fs_growth_min = parse_double(k, v); }},
      {{"tolerances", "square_stable_factor"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.square_stable_factor = parse_double(k, v); }},
      {{"tolerances", "rbound_spread_max"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.rbound_spread_max = parse_double(k, v); }},
      {{"tolerances", "doubling_bounded_max"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.doubling_bounded_max = parse_double(k, v); }},
      {{"tolerances", "doubling_stable_factor"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.doubling_stable_factor = parse_double(k, v); }},
      {{"tolerances", "doubling_growth_min"}, [](RunConfig& c, const std::string& k, const std::string& v) { c.tol.doubling_growth_min = parse_double(k, v); }},
  };

  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "mesh" && section != "params" &&
          section != "tolerances") {
        throw ConfigError("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("field '" + key + "' appears before any section header");
    }
    const auto it = table.find({section, key});
    if (it == table.end()) {
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    }
    it->second(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mwe::config
