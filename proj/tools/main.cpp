// Command-line driver: runs named experiment scenarios and writes CSV/JSON
// reports.  Exit codes: 0 all assertions pass, 1 assertion failure, 2
// configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "mwe/config.hpp"
#include "mwe/csv.hpp"
#include "mwe/scenarios.hpp"

namespace fs = std::filesystem;
using mwe::config::ConfigError;
using mwe::config::RunConfig;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string scenario;
  std::string out;
  int64_t seed = -1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "path to a run configuration file");
  cmd->add_option("--scenario", flags.scenario, "run a single named scenario");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--seed", flags.seed, "seed for randomized scenarios");
  cmd->add_option("--threads", flags.threads, "worker threads for scenario batches");
}

RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = mwe::config::load_config_file(flags.config_path);
  }
  if (!flags.scenario.empty()) cfg.scenario = flags.scenario;
  if (!flags.out.empty()) cfg.out = flags.out;
  if (flags.seed >= 0) cfg.seed = static_cast<uint64_t>(flags.seed);
  if (flags.threads > 0) cfg.threads = flags.threads;
  return cfg;
}

int run_batch(const std::string& subcommand, const CommonFlags& flags) {
  const RunConfig cfg = resolve_config(flags);
  std::vector<std::string> names;
  if (!cfg.scenario.empty()) {
    names = {cfg.scenario};
  } else {
    names = mwe::scenarios::scenarios_for_subcommand(subcommand);
  }
  fs::create_directories(cfg.out);

  std::vector<mwe::scenarios::ScenarioResult> results(names.size());
  std::vector<std::string> errors(names.size());
  auto work = [&](size_t i) {
    try {
      results[i] = mwe::scenarios::run_scenario(names[i], cfg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  if (cfg.threads > 1 && names.size() > 1) {
    std::vector<std::thread> pool;
    for (size_t i = 0; i < names.size(); ++i) pool.emplace_back(work, i);
    for (auto& th : pool) th.join();
  } else {
    for (size_t i = 0; i < names.size(); ++i) work(i);
  }

  bool all_pass = true;
  for (size_t i = 0; i < names.size(); ++i) {
    if (!errors[i].empty()) {
      std::fprintf(stderr, "error: scenario %s failed to run: %s\n",
                   names[i].c_str(), errors[i].c_str());
      return 2;
    }
    const auto& res = results[i];
    for (const auto& a : res.assertions) {
      std::printf("%s %s/%s: measured=%.6g target=%.6g tolerance=%.6g\n",
                  a.pass ? "PASS" : "FAIL", res.scenario.c_str(), a.name.c_str(),
                  a.measured, a.target, a.tolerance);
      all_pass = all_pass && a.pass;
    }
    mwe::csv::write_file((fs::path(cfg.out) / (res.scenario + ".json")).string(),
                         res.to_json());
    for (const auto& [file, contents] : res.csv_files) {
      mwe::csv::write_file((fs::path(cfg.out) / file).string(), contents);
    }
  }
  return all_pass ? 0 : 1;
}

int run_report(const CommonFlags& flags) {
  const RunConfig cfg = resolve_config(flags);
  nlohmann::json summary;
  summary["scenarios"] = nlohmann::json::array();
  bool all_pass = true;
  size_t found = 0;
  for (const auto& name : mwe::scenarios::scenario_names()) {
    const fs::path path = fs::path(cfg.out) / (name + ".json");
    if (!fs::exists(path)) continue;
    std::ifstream in(path);
    nlohmann::json doc = nlohmann::json::parse(in);
    for (const auto& a : doc["assertions"]) {
      all_pass = all_pass && a["pass"].get<bool>();
    }
    summary["scenarios"].push_back(doc);
    ++found;
  }
  if (found == 0) {
    std::fprintf(stderr, "error: no scenario reports found in %s\n", cfg.out.c_str());
    return 2;
  }
  summary["pass"] = all_pass;
  mwe::csv::write_file((fs::path(cfg.out) / "summary.json").string(),
                       summary.dump(2) + "\n");
  std::printf("%s aggregated %zu scenario reports into %s/summary.json\n",
              all_pass ? "PASS" : "FAIL", found, cfg.out.c_str());
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resolvent and maximal-function experiments on manifolds with ends"};
  app.require_subcommand(1);

  const std::vector<std::string> batch_commands = {
      "kernel", "norms", "maximal", "fefferman-stein", "square", "rbound"};
  std::map<std::string, CommonFlags> flags;
  for (const auto& name : batch_commands) {
    auto* cmd = app.add_subcommand(name, "run the " + name + " scenario set");
    add_common(cmd, flags[name]);
  }
  auto* report = app.add_subcommand("report", "aggregate scenario reports");
  add_common(report, flags["report"]);

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& name : batch_commands) {
      if (app.got_subcommand(name)) return run_batch(name, flags[name]);
    }
    if (app.got_subcommand("report")) return run_report(flags["report"]);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
