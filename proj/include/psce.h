/* Parabolic scalar curvature equation laboratory - public C API.
 *
 * All functions return a psce_status; on failure psce_last_error() gives a
 * thread-local human-readable message. Objects are opaque handles created
 * and destroyed through this API. Handles returned by the library own their
 * resources and may outlive the inputs they were created from.
 */
#ifndef PSCE_H
#define PSCE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psce_status {
  PSCE_OK = 0,
  PSCE_ERR_INVALID_ARGUMENT = 1,
  PSCE_ERR_GRID_MISMATCH = 2,
  PSCE_ERR_BLOWUP_DETECTED = 3,
  PSCE_ERR_STEP_UNDERFLOW = 4,
  PSCE_ERR_NO_CONVERGENCE = 5,
  PSCE_ERR_POSITIVITY_LOSS = 6,
  PSCE_ERR_FIT_REJECTED = 7,
  PSCE_ERR_MONOTONICITY_VIOLATION = 8,
  PSCE_ERR_CONVEXITY_LOST = 9,
  PSCE_ERR_DIVERGENT_TAIL = 10,
  PSCE_ERR_SPAN_TOO_SHORT = 11,
  PSCE_ERR_TAIL_NOT_CONVERGED = 12,
  PSCE_ERR_MISSING_ARTIFACTS = 13,
  PSCE_ERR_CONFIG = 14,
  PSCE_ERR_IO = 15,
  PSCE_ERR_INTERNAL = 16
} psce_status;

typedef struct psce_grid psce_grid;
typedef struct psce_field psce_field;
typedef struct psce_trajectory psce_trajectory;

/* Thread-local message describing the most recent failure in this thread. */
const char* psce_last_error(void);
const char* psce_version(void);

/* ------------------------------------------------------------------ grid */

/* Periodic uniform grid on the flat dim-torus; period <= 0 selects 2*pi. */
psce_status psce_grid_create(int dim, int points_per_axis, double period,
                             psce_grid** out);
void psce_grid_free(psce_grid* grid);
int psce_grid_dim(const psce_grid* grid);
int psce_grid_points(const psce_grid* grid);
double psce_grid_period(const psce_grid* grid);
size_t psce_grid_size(const psce_grid* grid);

/* ----------------------------------------------------------------- field */

/* values may be NULL for a zero field; otherwise it must hold
 * psce_grid_size(grid) doubles in row-major axis order. */
psce_status psce_field_create(const psce_grid* grid, const double* values,
                              psce_field** out);
void psce_field_free(psce_field* field);
size_t psce_field_size(const psce_field* field);
psce_status psce_field_values(const psce_field* field, double* out, size_t n);
psce_status psce_field_minmax(const psce_field* field, double* min_out,
                              double* max_out);

/* Spectral operators on the field's grid. */
psce_status psce_laplacian(const psce_field* field, psce_field** out);
psce_status psce_integrate(const psce_field* field, double* out);
psce_status psce_greens_solve(const psce_field* field, psce_field** out);

/* ------------------------------------------------------------- evolution */

/* options_json keys (all optional unless noted):
 *   "frame": "r" | "t" | "tau"      (default "t"; "tau" runs the
 *                                    renormalized blow-up pipeline)
 *   "n": int >= 3                   (default 3)
 *   "time0", "time_end": doubles    (time_end required for "r"/"t")
 *   "f_constant": double > 0        (default 0.5)
 *   "f_values": [doubles]           (separable source; overrides f_constant)
 *   "rel_tol", "abs_tol", "blowup_threshold", "max_samples"
 * A run stopped by the blow-up threshold still returns PSCE_OK with the
 * partial trajectory. */
psce_status psce_evolve(const psce_field* initial, const char* options_json,
                        psce_trajectory** out);
void psce_trajectory_free(psce_trajectory* traj);
size_t psce_trajectory_size(const psce_trajectory* traj);
psce_status psce_trajectory_time(const psce_trajectory* traj, size_t i,
                                 double* out);
psce_status psce_trajectory_field(const psce_trajectory* traj, size_t i,
                                  psce_field** out);

/* Inverse-square blow-up fit on a t-frame trajectory. */
psce_status psce_estimate_blowup_time(const psce_trajectory* traj,
                                      double* t1_out);

/* ------------------------------------------------------------ stationary */

/* Solve Lap w + f w - 1/(2w) = 0 for w > 0; guess may be NULL. */
psce_status psce_solve_stationary(const psce_field* f, const psce_field* guess,
                                  psce_field** omega_out,
                                  double* residual_out);

/* ------------------------------------------------------------- scenarios */

/* JSON for the named preset scenario; free the string with
 * psce_string_free. */
psce_status psce_preset_config(const char* scenario, char** config_json_out);

/* Run a full scenario pipeline, writing artifacts under out_dir. seed < 0
 * keeps the seed from the config. checks_passed_out receives 1 when every
 * enabled check passed, else 0 (the run itself still succeeds). */
psce_status psce_run_scenario(const char* config_json, const char* out_dir,
                              long seed, int* checks_passed_out);

/* Stationary solve driven by a scenario config's grid/source blocks; writes
 * omega.csv and stationary.json under out_dir. */
psce_status psce_run_stationary(const char* config_json, const char* out_dir);

/* Blow-up run plus boundary-extension report (omega estimates, arc-length
 * map, exponent fits); writes extension.json under out_dir. The config must
 * describe a t-frame scenario. */
psce_status psce_run_extension(const char* config_json, const char* out_dir);

/* Consolidated summary of a completed run directory; free with
 * psce_string_free. */
psce_status psce_report(const char* run_dir, char** summary_out);

void psce_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* PSCE_H */
