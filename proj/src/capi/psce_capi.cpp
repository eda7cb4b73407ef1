#include "psce.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "core/diagnostics.hpp"
#include "core/evolution.hpp"
#include "core/extension.hpp"
#include "core/io.hpp"
#include "core/scenario.hpp"
#include "core/stationary.hpp"
#include "json.hpp"

using nlohmann::ordered_json;

struct psce_grid {
  std::shared_ptr<const psce::TorusGrid> g;
};

struct psce_field {
  std::shared_ptr<const psce::TorusGrid> g;
  psce::ScalarField f;
};

struct psce_trajectory {
  std::shared_ptr<const psce::TorusGrid> g;
  psce::Trajectory t;
};

namespace {

thread_local std::string g_last_error;

psce_status to_status(psce::ErrorCode code) {
  using EC = psce::ErrorCode;
  switch (code) {
    case EC::invalid_argument: return PSCE_ERR_INVALID_ARGUMENT;
    case EC::grid_mismatch: return PSCE_ERR_GRID_MISMATCH;
    case EC::blowup_detected: return PSCE_ERR_BLOWUP_DETECTED;
    case EC::step_underflow: return PSCE_ERR_STEP_UNDERFLOW;
    case EC::no_convergence: return PSCE_ERR_NO_CONVERGENCE;
    case EC::positivity_loss: return PSCE_ERR_POSITIVITY_LOSS;
    case EC::fit_rejected: return PSCE_ERR_FIT_REJECTED;
    case EC::monotonicity_violation: return PSCE_ERR_MONOTONICITY_VIOLATION;
    case EC::convexity_lost: return PSCE_ERR_CONVEXITY_LOST;
    case EC::divergent_tail: return PSCE_ERR_DIVERGENT_TAIL;
    case EC::span_too_short: return PSCE_ERR_SPAN_TOO_SHORT;
    case EC::tail_not_converged: return PSCE_ERR_TAIL_NOT_CONVERGED;
    case EC::missing_artifacts: return PSCE_ERR_MISSING_ARTIFACTS;
    case EC::config: return PSCE_ERR_CONFIG;
    case EC::io: return PSCE_ERR_IO;
    case EC::internal: return PSCE_ERR_INTERNAL;
  }
  return PSCE_ERR_INTERNAL;
}

template <typename Fn>
psce_status guarded(Fn&& fn) {
  try {
    fn();
    return PSCE_OK;
  } catch (const psce::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return PSCE_ERR_CONFIG;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PSCE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PSCE_ERR_INTERNAL;
  }
}

psce_status require_c(bool cond, const char* msg) {
  if (cond) return PSCE_OK;
  g_last_error = msg;
  return PSCE_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

psce_field* wrap_field(std::shared_ptr<const psce::TorusGrid> g,
                       psce::ScalarField f) {
  return new psce_field{std::move(g), std::move(f)};
}

}  // namespace

extern "C" {

const char* psce_last_error(void) { return g_last_error.c_str(); }

const char* psce_version(void) { return "1.0.0"; }

psce_status psce_grid_create(int dim, int points_per_axis, double period,
                             psce_grid** out) {
  if (auto st = require_c(out != nullptr, "out must not be NULL")) return st;
  return guarded([&] {
    const double p =
        period > 0.0 ? period : psce::TorusGrid::default_period();
    *out = new psce_grid{
        std::make_shared<const psce::TorusGrid>(dim, points_per_axis, p)};
  });
}

void psce_grid_free(psce_grid* grid) { delete grid; }

int psce_grid_dim(const psce_grid* grid) { return grid ? grid->g->dim() : 0; }

int psce_grid_points(const psce_grid* grid) {
  return grid ? grid->g->points_per_axis() : 0;
}

double psce_grid_period(const psce_grid* grid) {
  return grid ? grid->g->period() : 0.0;
}

size_t psce_grid_size(const psce_grid* grid) {
  return grid ? grid->g->size() : 0;
}

psce_status psce_field_create(const psce_grid* grid, const double* values,
                              psce_field** out) {
  if (auto st = require_c(grid && out, "grid and out must not be NULL"))
    return st;
  return guarded([&] {
    std::vector<double> v(grid->g->size(), 0.0);
    if (values) v.assign(values, values + grid->g->size());
    *out = wrap_field(grid->g, psce::ScalarField(*grid->g, std::move(v)));
  });
}

void psce_field_free(psce_field* field) { delete field; }

size_t psce_field_size(const psce_field* field) {
  return field ? field->f.size() : 0;
}

psce_status psce_field_values(const psce_field* field, double* out,
                              size_t n) {
  if (auto st = require_c(field && out, "field and out must not be NULL"))
    return st;
  if (auto st = require_c(n >= field->f.size(), "output buffer too small"))
    return st;
  std::memcpy(out, field->f.values().data(),
              field->f.size() * sizeof(double));
  return PSCE_OK;
}

psce_status psce_field_minmax(const psce_field* field, double* min_out,
                              double* max_out) {
  if (auto st = require_c(field != nullptr, "field must not be NULL"))
    return st;
  if (min_out) *min_out = field->f.min();
  if (max_out) *max_out = field->f.max();
  return PSCE_OK;
}

psce_status psce_laplacian(const psce_field* field, psce_field** out) {
  if (auto st = require_c(field && out, "field and out must not be NULL"))
    return st;
  return guarded([&] {
    *out = wrap_field(field->g, field->g->laplacian(field->f));
  });
}

psce_status psce_integrate(const psce_field* field, double* out) {
  if (auto st = require_c(field && out, "field and out must not be NULL"))
    return st;
  return guarded([&] { *out = field->g->integrate(field->f); });
}

psce_status psce_greens_solve(const psce_field* field, psce_field** out) {
  if (auto st = require_c(field && out, "field and out must not be NULL"))
    return st;
  return guarded([&] {
    *out = wrap_field(field->g, field->g->greens_solve(field->f));
  });
}

psce_status psce_evolve(const psce_field* initial, const char* options_json,
                        psce_trajectory** out) {
  if (auto st = require_c(initial && out, "initial and out must not be NULL"))
    return st;
  return guarded([&] {
    ordered_json j = options_json && *options_json
                         ? ordered_json::parse(options_json)
                         : ordered_json::object();
    const std::string frame_kind = j.value("frame", std::string("t"));
    psce::EvolveOptions opts;
    opts.integrate.rel_tol = j.value("rel_tol", opts.integrate.rel_tol);
    opts.integrate.abs_tol = j.value("abs_tol", opts.integrate.abs_tol);
    opts.integrate.blowup_threshold =
        j.value("blowup_threshold", opts.integrate.blowup_threshold);
    opts.integrate.max_samples =
        j.value("max_samples", opts.integrate.max_samples);

    psce::SourceTerm f = psce::SourceTerm::constant(j.value("f_constant", 0.5));
    if (j.contains("f_values")) {
      std::vector<double> fv = j.at("f_values").get<std::vector<double>>();
      f = psce::SourceTerm::separable(
          psce::ScalarField(*initial->g, std::move(fv)));
    }

    if (frame_kind == "tau") {
      psce::TauRunResult run =
          psce::evolve_tau_renormalized(initial->f, f, opts);
      *out = new psce_trajectory{initial->g, std::move(run.tau_trajectory)};
      return;
    }
    psce::Frame frame;
    frame.kind = frame_kind == "r" ? psce::FrameKind::r_frame
                                   : psce::FrameKind::t_frame;
    frame.n = j.value("n", 3);
    frame.r0 = j.value("r0", 1.0);
    psce::require(frame_kind == "r" || frame_kind == "t",
                  psce::ErrorCode::invalid_argument,
                  "frame must be one of r, t, tau");
    psce::require(j.contains("time_end"), psce::ErrorCode::invalid_argument,
                  "time_end is required for r/t frame runs");
    const double t0 = j.value("time0", 0.0);
    const double t_end = j.at("time_end").get<double>();
    psce::EvolveResult run =
        psce::evolve(frame, initial->f, f, t0, t_end, opts);
    *out = new psce_trajectory{initial->g, std::move(run.trajectory)};
  });
}

void psce_trajectory_free(psce_trajectory* traj) { delete traj; }

size_t psce_trajectory_size(const psce_trajectory* traj) {
  return traj ? traj->t.size() : 0;
}

psce_status psce_trajectory_time(const psce_trajectory* traj, size_t i,
                                 double* out) {
  if (auto st = require_c(traj && out, "traj and out must not be NULL"))
    return st;
  return guarded([&] { *out = traj->t.time(i); });
}

psce_status psce_trajectory_field(const psce_trajectory* traj, size_t i,
                                  psce_field** out) {
  if (auto st = require_c(traj && out, "traj and out must not be NULL"))
    return st;
  return guarded([&] { *out = wrap_field(traj->g, traj->t.field(i)); });
}

psce_status psce_estimate_blowup_time(const psce_trajectory* traj,
                                      double* t1_out) {
  if (auto st = require_c(traj && t1_out, "traj and t1 must not be NULL"))
    return st;
  return guarded(
      [&] { *t1_out = psce::estimate_blowup_time(traj->t).t1; });
}

psce_status psce_solve_stationary(const psce_field* f,
                                  const psce_field* guess,
                                  psce_field** omega_out,
                                  double* residual_out) {
  if (auto st = require_c(f && omega_out, "f and omega must not be NULL"))
    return st;
  return guarded([&] {
    std::optional<psce::ScalarField> g;
    if (guess) g = guess->f;
    psce::StationaryState st = psce::solve_stationary(*f->g, f->f, g);
    if (residual_out) *residual_out = st.residual_norm;
    *omega_out = wrap_field(f->g, std::move(st.omega));
  });
}

psce_status psce_preset_config(const char* scenario,
                               char** config_json_out) {
  if (auto st = require_c(scenario && config_json_out,
                          "scenario and out must not be NULL"))
    return st;
  return guarded([&] {
    *config_json_out = dup_string(psce::preset(scenario).to_json());
  });
}

psce_status psce_run_scenario(const char* config_json, const char* out_dir,
                              long seed, int* checks_passed_out) {
  if (auto st =
          require_c(config_json && out_dir, "config and dir must not be NULL"))
    return st;
  return guarded([&] {
    psce::ExperimentConfig c = psce::ExperimentConfig::from_json(config_json);
    if (seed >= 0) c.seed = static_cast<unsigned>(seed);
    psce::RunResult r = psce::run_scenario(c, out_dir);
    if (checks_passed_out) *checks_passed_out = r.pass ? 1 : 0;
  });
}

psce_status psce_run_stationary(const char* config_json,
                                const char* out_dir) {
  if (auto st =
          require_c(config_json && out_dir, "config and dir must not be NULL"))
    return st;
  return guarded([&] {
    psce::ExperimentConfig c = psce::ExperimentConfig::from_json(config_json);
    const double period =
        c.period > 0.0 ? c.period : psce::TorusGrid::default_period();
    psce::TorusGrid grid(c.dim, c.points, period);
    psce::ScalarField f(grid);
    std::size_t inner = 1;
    for (int a = 1; a < grid.dim(); ++a)
      inner *= static_cast<std::size_t>(grid.points_per_axis());
    const auto& th = grid.axis_coordinates();
    for (std::size_t i = 0; i < grid.size(); ++i)
      f[i] = c.f_constant * (1.0 + c.f_amplitude * std::cos(th[i / inner]));
    psce::StationaryState st = psce::solve_stationary(grid, f);

    std::filesystem::create_directories(out_dir);
    psce::write_field(std::filesystem::path(out_dir) / "omega.csv", st.omega);
    ordered_json j;
    j["residual_norm"] = st.residual_norm;
    j["iterations"] = st.iterations;
    j["omega_min"] = st.omega.min();
    j["omega_max"] = st.omega.max();
    j["residual_history"] = st.residual_history;
    std::ofstream(std::filesystem::path(out_dir) / "stationary.json")
        << j.dump(2) << "\n";
  });
}

psce_status psce_run_extension(const char* config_json, const char* out_dir) {
  if (auto st =
          require_c(config_json && out_dir, "config and dir must not be NULL"))
    return st;
  return guarded([&] {
    psce::ExperimentConfig c = psce::ExperimentConfig::from_json(config_json);
    psce::require(c.frame == "t", psce::ErrorCode::config,
                  "extension reports require a t-frame blow-up run");
    const double period =
        c.period > 0.0 ? c.period : psce::TorusGrid::default_period();
    psce::TorusGrid grid(c.dim, c.points, period);
    std::size_t inner = 1;
    for (int a = 1; a < grid.dim(); ++a)
      inner *= static_cast<std::size_t>(grid.points_per_axis());
    const auto& th = grid.axis_coordinates();
    psce::ScalarField u0(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      u0[i] = c.v0_base + c.v0_amplitude * std::cos(th[i / inner]);
    psce::SourceTerm f = psce::SourceTerm::constant(c.f_constant);

    psce::Frame frame;
    frame.kind = psce::FrameKind::t_frame;
    frame.n = c.n;
    frame.r0 = c.r0;
    psce::EvolveOptions opts;
    opts.integrate.rel_tol = c.rel_tol;
    opts.integrate.abs_tol = c.abs_tol;
    opts.integrate.blowup_threshold = c.blowup_threshold;
    opts.integrate.max_samples = c.max_samples;
    psce::EvolveResult run =
        psce::evolve(frame, u0, f, c.time0, c.time_end, opts);
    psce::BlowupFit fit = psce::estimate_blowup_time(run.trajectory);
    psce::Trajectory norm =
        psce::normalize_blowup(run.trajectory, fit.t1);
    psce::ExtensionReport rep = psce::build_extension_report(norm);

    std::filesystem::create_directories(out_dir);
    psce::write_field(std::filesystem::path(out_dir) / "omega_estimate.csv",
                      rep.omega_estimates.back());
    ordered_json j;
    j["blowup_time"] = fit.t1;
    j["r1"] = rep.r1;
    j["eps_levels"] = rep.eps_levels;
    j["cauchy_diffs"] = rep.cauchy_diffs;
    j["omega_mean"] = rep.omega_mean;
    j["H_levels"] = rep.H_levels;
    j["u_exponent"] = rep.u_exponent;
    j["H_exponent"] = rep.H_exponent;
    j["rtilde_total"] = rep.rtilde_total;
    j["tail_fraction"] = rep.tail_fraction;
    std::ofstream(std::filesystem::path(out_dir) / "extension.json")
        << j.dump(2) << "\n";
  });
}

psce_status psce_report(const char* run_dir, char** summary_out) {
  if (auto st =
          require_c(run_dir && summary_out, "dir and out must not be NULL"))
    return st;
  return guarded([&] { *summary_out = dup_string(psce::report(run_dir)); });
}

void psce_string_free(char* s) { std::free(s); }

}  // extern "C"
