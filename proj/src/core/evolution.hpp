#pragma once

#include "core/integrator.hpp"
#include "core/source_term.hpp"
#include "core/trajectory.hpp"

namespace psce {

struct EvolveOptions {
  IntegrateOptions integrate;
  /// Reject steps whose minimum falls at or below this floor.
  double positivity_floor = 0.0;
};

struct EvolveResult {
  Trajectory trajectory;
  StopReason reason = StopReason::reached_end;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
};

/// Integrate the curvature flow in the frame carried by `frame`:
///   r:   (n-1) r du/dr = u^2 Lap u + (n-1)(n-2)/2 u + f u^3
///   t:   du~/dt = u~^2 Lap u~ + f u~^3
///   tau: dv/dtau = v^2 Lap v + f v^3 - v/2
EvolveResult evolve(const Frame& frame, const ScalarField& initial,
                    const SourceTerm& source, double time0, double time_end,
                    const EvolveOptions& opts = {});

/// Max-norm of (u2 - u1)/dt - RHS(midpoint average, midpoint time) between
/// two consecutive trajectory samples.
double residual(const Trajectory& traj, const SourceTerm& source,
                std::size_t i);

struct BlowupFit {
  double t1 = 0.0;       // estimated blow-up time
  double r_squared = 0.0;
  double growth = 0.0;   // sup over the run / sup at the start
  std::size_t points_used = 0;
};

/// Fit y(t) = 1 / sup u~(t)^2 against t on the trailing `fraction` of the
/// samples; the root of the affine fit estimates the blow-up time t1.
/// Fails with fit_rejected when R^2 < 0.999 or sup grew less than 10x.
BlowupFit estimate_blowup_time(const Trajectory& traj, double fraction = 0.2);

/// Rescale a t-frame run so that the blow-up sits at t1 = 1:
/// t -> t/t1, u~ -> sqrt(t1) u~ (and the source table times likewise).
Trajectory normalize_blowup(const Trajectory& traj, double t1);

/// Map a normalized t-frame run (t1 = 1) to (tau, v).
Trajectory to_tau_frame(const Trajectory& traj);

struct TauRunResult {
  Trajectory tau_trajectory;  // (tau, v) samples
  Trajectory t_trajectory;    // the normalized t-frame run it came from
  BlowupFit fit;
  SourceTerm source_rescaled; // source in the normalized time variable
  std::size_t steps_accepted = 0;
};

/// The renormalized route to the tau frame: integrate the t-frame equation
/// up to the blow-up threshold, fit t1, normalize, and change frames.
/// Integrating the tau-frame equation directly is ill-posed: the mean mode
/// of the linearization about a steady profile is always expanding, and
/// only the blow-up-time normalization removes it.
TauRunResult evolve_tau_renormalized(const ScalarField& initial_v,
                                     const SourceTerm& source,
                                     const EvolveOptions& opts = {},
                                     double fit_fraction = 0.2);

}  // namespace psce
