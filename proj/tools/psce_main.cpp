// Command-line experiment runner. Everything numerical goes through the
// shared library's C API; this file is argument plumbing only.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "psce.h"

namespace {

namespace fs = std::filesystem;

int fail_with(const std::string& context) {
  std::cerr << "error: " << context << ": " << psce_last_error() << "\n";
  return 1;
}

std::string default_out_root() {
  if (const char* env = std::getenv("PSCE_OUT_ROOT")) return env;
  return "psce_runs";
}

/// Config text from --config, else the preset for --scenario.
bool resolve_config(const std::string& config_path,
                    const std::string& scenario, std::string& out) {
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in.good()) {
      std::cerr << "error: cannot read config file " << config_path << "\n";
      return false;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
  }
  char* text = nullptr;
  if (psce_preset_config(scenario.c_str(), &text) != PSCE_OK) {
    fail_with("preset " + scenario);
    return false;
  }
  out = text;
  psce_string_free(text);
  return true;
}

std::string resolve_out_dir(const std::string& out, const std::string& name) {
  if (!out.empty()) return out;
  return (fs::path(default_out_root()) / name).string();
}

int run_pipeline(const std::string& config_path, const std::string& scenario,
                 const std::string& out, long seed) {
  std::string config;
  if (!resolve_config(config_path, scenario, config)) return 1;
  const std::string dir = resolve_out_dir(out, scenario);
  int checks_passed = 0;
  if (psce_run_scenario(config.c_str(), dir.c_str(), seed, &checks_passed) !=
      PSCE_OK)
    return fail_with("run");
  char* summary = nullptr;
  if (psce_report(dir.c_str(), &summary) == PSCE_OK) {
    std::cout << summary;
    psce_string_free(summary);
  }
  std::cout << "artifacts: " << dir << "\n";
  return checks_passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parabolic scalar curvature equation laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir, scenario, run_dir;
  long seed = -1;

  // Each subcommand has its own default scenario; the shared string is
  // filled after parsing so one subcommand's default cannot leak into
  // another's.
  std::map<const CLI::App*, std::string> default_scenarios;
  auto add_common = [&](CLI::App* cmd, const std::string& default_scenario) {
    cmd->add_option("--config", config_path, "JSON experiment config");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "seed for randomized checks");
    cmd->add_option("--scenario", scenario, "named preset scenario");
    default_scenarios[cmd] = default_scenario;
  };

  CLI::App* evolve = app.add_subcommand(
      "evolve", "run an evolution scenario and its checks");
  add_common(evolve, "CUSTOM");
  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "run a scenario and report every diagnostic check");
  add_common(diagnose, "CONSTANT_F_TAU");
  CLI::App* csf = app.add_subcommand(
      "csf", "curve shortening flow scenarios");
  add_common(csf, "CSF_ELLIPSE");
  CLI::App* stationary = app.add_subcommand(
      "stationary", "solve the stationary equation for the config's source");
  add_common(stationary, "CUSTOM");
  CLI::App* extend = app.add_subcommand(
      "extend", "blow-up run plus boundary-extension report");
  add_common(extend, "TRIVIAL_ODE");
  CLI::App* report = app.add_subcommand(
      "report", "summarize a completed run directory");
  report->add_option("run_dir", run_dir, "completed run directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (scenario.empty())
    for (const auto& [cmd, name] : default_scenarios)
      if (cmd->parsed()) scenario = name;

  if (report->parsed()) {
    char* summary = nullptr;
    if (psce_report(run_dir.c_str(), &summary) != PSCE_OK)
      return fail_with("report");
    std::cout << summary;
    psce_string_free(summary);
    return 0;
  }

  if (stationary->parsed()) {
    std::string config;
    if (!resolve_config(config_path, scenario, config)) return 1;
    const std::string dir = resolve_out_dir(out_dir, "stationary");
    if (psce_run_stationary(config.c_str(), dir.c_str()) != PSCE_OK)
      return fail_with("stationary");
    std::cout << "artifacts: " << dir << "\n";
    return 0;
  }

  if (extend->parsed()) {
    std::string config;
    if (!resolve_config(config_path, scenario, config)) return 1;
    const std::string dir = resolve_out_dir(out_dir, "extend");
    if (psce_run_extension(config.c_str(), dir.c_str()) != PSCE_OK)
      return fail_with("extend");
    std::cout << "artifacts: " << dir << "\n";
    return 0;
  }

  // evolve / diagnose / csf all execute the scenario pipeline.
  return run_pipeline(config_path, scenario, out_dir, seed);
}
