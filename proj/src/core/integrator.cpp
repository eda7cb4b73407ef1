#include "core/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace psce {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0,
                 e3 = 500.0 / 1113.0 - 7571.0 / 16695.0,
                 e4 = 125.0 / 192.0 - 393.0 / 640.0,
                 e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0,
                 e6 = 11.0 / 84.0 - 187.0 / 2100.0, e7 = -1.0 / 40.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                 c5 = 8.0 / 9.0;

bool finite_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

IntegrateResult integrate_dopri(const OdeRhs& rhs, std::vector<double>& y,
                                double t0, double t_end,
                                const IntegrateOptions& opts,
                                const StateGuard& guard,
                                const StopMeasure& stop_measure,
                                const SampleSink& sink) {
  require(t_end > t0, ErrorCode::invalid_argument,
          "integration requires t_end > t0");
  require(opts.rel_tol > 0.0 && opts.abs_tol > 0.0, ErrorCode::invalid_argument,
          "integration tolerances must be positive");
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  std::vector<double> ytmp(n), ynew(n);

  IntegrateResult res;
  double t = t0;
  double dt = opts.dt_init;
  const double dt_max = opts.dt_max > 0.0 ? opts.dt_max : t_end - t0;
  dt = std::min(dt, dt_max);
  double err_prev = 1.0;
  bool first = true;
  int guard_rejects_in_a_row = 0;

  if (sink) sink(t, y);
  rhs(t, y, k1);

  // Within-roundoff of t_end counts as arrival; otherwise the final step
  // degenerates to machine epsilon and stores a duplicate sample.
  const double t_edge =
      4.0 * std::numeric_limits<double>::epsilon() *
      std::max(std::abs(t0), std::abs(t_end));
  while (t < t_end - t_edge) {
    if (res.steps_accepted + res.steps_rejected >= opts.max_steps)
      fail(ErrorCode::no_convergence, "integration exceeded max step count");
    dt = std::min(dt, t_end - t);
    // Stretch a near-final step (even past dt_max) so the run lands on
    // t_end instead of leaving a machine-epsilon leftover interval.
    if (t_end - t <= 1.05 * dt) dt = t_end - t;

    auto stage = [&](double c, const std::vector<double>& yin,
                     std::vector<double>& kout) { rhs(t + c * dt, yin, kout); };

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dt * a21 * k1[i];
    stage(c2, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + dt * (a31 * k1[i] + a32 * k2[i]);
    stage(c3, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + dt * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    stage(c4, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] =
          y[i] + dt * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    stage(c5, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + dt * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                             a64 * k4[i] + a65 * k5[i]);
    stage(1.0, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                             b5 * k5[i] + b6 * k6[i]);
    rhs(t + dt, ynew, k7);  // FSAL stage

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                             e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc =
          opts.abs_tol +
          opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / sc);
    }

    const bool finite = finite_all(ynew) && std::isfinite(err);
    const bool admissible = finite && (!guard || guard(ynew));
    if (finite && err <= 1.0 && admissible) {
      t += dt;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      ++res.steps_accepted;
      guard_rejects_in_a_row = 0;

      if (sink) sink(t, y);
      if (stop_measure && stop_measure(y) >= opts.blowup_threshold) {
        res.reason = StopReason::blowup_detected;
        res.t_end = t;
        return res;
      }

      // PI controller (Gustafsson): order-5 error estimate.
      double fac;
      if (!finite) {
        fac = 0.1;
      } else if (first) {
        fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
        first = false;
      } else {
        fac = 0.9 * std::pow(std::max(err, 1e-16), -0.7 / 5.0) *
              std::pow(std::max(err_prev, 1e-16), 0.4 / 5.0);
      }
      err_prev = std::max(err, 1e-16);
      dt *= std::clamp(fac, 0.2, 5.0);
      dt = std::min(dt, dt_max);
    } else {
      ++res.steps_rejected;
      if (!finite || !admissible) {
        dt *= 0.5;
        if (++guard_rejects_in_a_row > 200) {
          res.reason = StopReason::guard_failed;
          res.t_end = t;
          return res;
        }
      } else {
        dt *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
      if (dt < opts.dt_min) {
        res.reason = StopReason::step_underflow;
        res.t_end = t;
        return res;
      }
    }
  }

  res.reason = StopReason::reached_end;
  res.t_end = t;
  return res;
}

}  // namespace psce
