#pragma once

#include <functional>
#include <vector>

#include "core/errors.hpp"

namespace psce {

enum class StopReason {
  reached_end,      // integrated to t_end
  blowup_detected,  // stop_measure crossed blowup_threshold
  step_underflow,   // dt fell below dt_min while error-controlled
  guard_failed,     // state guard rejected every admissible step
};

struct IntegrateOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double dt_init = 1e-4;
  double dt_min = 1e-14;
  double dt_max = 0.0;  // 0 = no cap
  double blowup_threshold = 1e6;
  std::size_t max_samples = 4000;  // stored samples; decimated beyond this
  std::size_t max_steps = 50'000'000;
};

struct IntegrateResult {
  StopReason reason = StopReason::reached_end;
  double t_end = 0.0;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
};

/// y' = f(t, y) for f(t, in, out).
using OdeRhs =
    std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

/// Returns true if the state is admissible (e.g. positive); a step landing on
/// an inadmissible state is rejected and retried with a smaller dt.
using StateGuard = std::function<bool(const std::vector<double>&)>;

/// Scalar whose crossing of blowup_threshold stops the run (e.g. sup y).
using StopMeasure = std::function<double(const std::vector<double>&)>;

/// Called after each accepted step; return false to skip storing the sample.
using SampleSink = std::function<void(double, const std::vector<double>&)>;

/// Dormand-Prince 5(4) with FSAL and PI step-size control. Samples are pushed
/// to `sink` at every accepted step; callers that cap storage handle
/// decimation themselves (see evolve()).
IntegrateResult integrate_dopri(const OdeRhs& rhs, std::vector<double>& y,
                                double t0, double t_end,
                                const IntegrateOptions& opts,
                                const StateGuard& guard,
                                const StopMeasure& stop_measure,
                                const SampleSink& sink);

}  // namespace psce
