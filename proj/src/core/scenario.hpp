#pragma once

#include <filesystem>
#include <string>

#include "core/evolution.hpp"

namespace psce {

/// Everything needed to reproduce one run. Serializes losslessly to JSON.
struct ExperimentConfig {
  std::string scenario = "CUSTOM";  // TRIVIAL_ODE, CONSTANT_F_TAU,
                                    // PERTURBED_F, CSF_CIRCLE, CSF_ELLIPSE,
                                    // CUSTOM
  // grid
  int dim = 2;
  int points = 64;
  double period = 0.0;  // 0 = default 2 pi

  // frame
  int n = 3;
  double r0 = 1.0;
  std::string frame = "t";  // r | t | tau (tau runs via renormalization)

  // source f = f_constant (1 + f_amplitude cos theta_1)
  double f_constant = 0.5;
  double f_amplitude = 0.0;

  // initial data v0 = v0_base + v0_amplitude cos theta_1
  double v0_base = 1.0;
  double v0_amplitude = 0.0;
  double time0 = 0.0;
  double time_end = 1.0;

  // curve-flow scenarios
  double csf_a = 2.0;
  double csf_b = 1.0;
  double csf_radius = 1.0;

  // solver
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double blowup_threshold = 1e6;
  std::size_t max_samples = 2000;
  int sample_stride = 1;
  unsigned seed = 0;

  void validate() const;
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
};

/// The frozen presets behind the named scenarios.
ExperimentConfig preset(const std::string& scenario);

struct RunResult {
  bool pass = true;
  std::string diagnostics_json;  // also written to <out_dir>/diagnostics.json
};

/// Execute the scenario pipeline and write config.json, trajectory.csv,
/// series.csv, diagnostics.json, and field snapshots under out_dir.
RunResult run_scenario(const ExperimentConfig& config,
                       const std::filesystem::path& out_dir);

/// Consolidate a completed run directory into a human-readable summary
/// (also written to <run_dir>/summary.txt). Throws missing_artifacts.
std::string report(const std::filesystem::path& run_dir);

}  // namespace psce
