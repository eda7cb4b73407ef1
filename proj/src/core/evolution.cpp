#include "core/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace psce {

namespace {

double sample_time_in_t(const Frame& frame, double time) {
  switch (frame.kind) {
    case FrameKind::r_frame: return r_to_t(time, frame.n);
    case FrameKind::t_frame: return time;
    case FrameKind::tau_frame: return tau_to_t(time);
  }
  return time;
}

}  // namespace

EvolveResult evolve(const Frame& frame, const ScalarField& initial,
                    const SourceTerm& source, double time0, double time_end,
                    const EvolveOptions& opts) {
  frame.validate();
  const TorusGrid& g = initial.grid();
  require(initial.all_finite() && initial.all_positive(),
          ErrorCode::invalid_argument,
          "evolution requires positive finite initial data");
  require(source.spatial_size() == 0 || source.spatial_size() == g.size(),
          ErrorCode::grid_mismatch, "source does not match grid");
  if (frame.kind == FrameKind::r_frame)
    require(time0 > 0.0, ErrorCode::invalid_argument,
            "r-frame evolution requires r > 0");

  const std::size_t m = g.size();
  std::vector<double> lap(m), fbuf(m);
  const bool f_static = source.constant_in_time();
  if (f_static) source.eval(0.0, fbuf);

  const double cn = 0.5 * (frame.n - 1) * (frame.n - 2);
  const double inv_nm1 = 1.0 / (frame.n - 1);

  OdeRhs rhs = [&](double time, const std::vector<double>& y,
                   std::vector<double>& out) {
    g.laplacian_inplace(y.data(), out.data());
    std::swap(lap, out);
    if (!f_static) source.eval(sample_time_in_t(frame, time), fbuf);
    switch (frame.kind) {
      case FrameKind::t_frame:
        for (std::size_t i = 0; i < m; ++i) {
          const double u = y[i];
          out[i] = u * u * (lap[i] + fbuf[i] * u);
        }
        break;
      case FrameKind::tau_frame:
        for (std::size_t i = 0; i < m; ++i) {
          const double u = y[i];
          out[i] = u * u * (lap[i] + fbuf[i] * u) - 0.5 * u;
        }
        break;
      case FrameKind::r_frame:
        for (std::size_t i = 0; i < m; ++i) {
          const double u = y[i];
          out[i] =
              (u * u * (lap[i] + fbuf[i] * u) + cn * u) * inv_nm1 / time;
        }
        break;
    }
  };

  const double floor = opts.positivity_floor;
  StateGuard guard = [floor](const std::vector<double>& y) {
    return std::all_of(y.begin(), y.end(),
                       [floor](double v) { return v > floor; });
  };
  StopMeasure stop = [](const std::vector<double>& y) {
    return *std::max_element(y.begin(), y.end());
  };

  EvolveResult res{Trajectory(frame)};
  Trajectory& traj = res.trajectory;
  std::size_t stride = 1, accepted = 0;
  double last_t = time0;
  std::vector<double> last_y;
  SampleSink sink = [&](double t, const std::vector<double>& y) {
    last_t = t;
    last_y = y;
    if (accepted++ % stride != 0) return;
    traj.push(t, ScalarField(g, y));
    if (traj.size() > opts.integrate.max_samples) {
      traj.decimate();
      stride *= 2;
    }
  };

  std::vector<double> y(initial.values().begin(), initial.values().end());
  IntegrateResult ir = integrate_dopri(rhs, y, time0, time_end, opts.integrate,
                                       guard, stop, sink);
  if (traj.back_time() < last_t) traj.push(last_t, ScalarField(g, last_y));

  res.reason = ir.reason;
  res.steps_accepted = ir.steps_accepted;
  res.steps_rejected = ir.steps_rejected;
  return res;
}

double residual(const Trajectory& traj, const SourceTerm& source,
                std::size_t i) {
  require(i + 1 < traj.size(), ErrorCode::invalid_argument,
          "residual needs two consecutive samples");
  const Frame& frame = traj.frame();
  const ScalarField& u1 = traj.field(i);
  const ScalarField& u2 = traj.field(i + 1);
  const TorusGrid& g = u1.grid();
  const double t1 = traj.time(i), t2 = traj.time(i + 1);
  const double dt = t2 - t1, tm = 0.5 * (t1 + t2);

  ScalarField mid(g);
  for (std::size_t j = 0; j < g.size(); ++j) mid[j] = 0.5 * (u1[j] + u2[j]);
  ScalarField lap = g.laplacian(mid);
  ScalarField f = source.at(g, sample_time_in_t(frame, tm));

  const double cn = 0.5 * (frame.n - 1) * (frame.n - 2);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double u = mid[j];
    double r = 0.0;
    switch (frame.kind) {
      case FrameKind::t_frame:
        r = u * u * (lap[j] + f[j] * u);
        break;
      case FrameKind::tau_frame:
        r = u * u * (lap[j] + f[j] * u) - 0.5 * u;
        break;
      case FrameKind::r_frame:
        r = (u * u * (lap[j] + f[j] * u) + cn * u) / ((frame.n - 1) * tm);
        break;
    }
    worst = std::max(worst, std::abs((u2[j] - u1[j]) / dt - r));
  }
  return worst;
}

BlowupFit estimate_blowup_time(const Trajectory& traj, double fraction) {
  require(traj.frame().kind == FrameKind::t_frame, ErrorCode::invalid_argument,
          "blow-up time is fit on a t-frame run");
  require(traj.size() >= 8, ErrorCode::span_too_short,
          "too few samples to fit the blow-up time");
  require(fraction > 0.0 && fraction <= 1.0, ErrorCode::invalid_argument,
          "fit fraction must lie in (0, 1]");

  const std::size_t n = traj.size();
  std::size_t first = n - std::max<std::size_t>(
                              5, static_cast<std::size_t>(fraction * n));
  BlowupFit fit;
  fit.points_used = n - first;
  fit.growth = traj.diag(n - 1).max / traj.diag(0).max;

  // Least squares on y = 1/sup^2 versus t; near blow-up y is affine in t
  // with slope -1/omega_sup^2 for the constant-in-time limit profile.
  // Center both variables before forming normal equations; the raw sums
  // cancel catastrophically when t is O(1) and y is tiny.
  const double np = static_cast<double>(fit.points_used);
  double t_mean = 0, y_mean = 0;
  for (std::size_t i = first; i < n; ++i) {
    const double s = traj.diag(i).max;
    t_mean += traj.time(i);
    y_mean += 1.0 / (s * s);
  }
  t_mean /= np;
  y_mean /= np;
  double stt = 0, sty = 0, syy = 0;
  for (std::size_t i = first; i < n; ++i) {
    const double s = traj.diag(i).max;
    const double dt = traj.time(i) - t_mean;
    const double dy = 1.0 / (s * s) - y_mean;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  require(stt > 0.0, ErrorCode::fit_rejected, "degenerate blow-up fit window");
  const double slope = sty / stt;
  const double intercept = y_mean - slope * t_mean;
  require(slope < 0.0, ErrorCode::fit_rejected,
          "sup is not growing; no blow-up to fit");
  fit.t1 = -intercept / slope;

  double ss_res = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const double s = traj.diag(i).max;
    const double d = 1.0 / (s * s) - y_mean - slope * (traj.time(i) - t_mean);
    ss_res += d * d;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;

  require(fit.growth >= 10.0, ErrorCode::fit_rejected,
          "sup grew less than 10x; run closer to blow-up before fitting");
  require(fit.r_squared >= 0.999, ErrorCode::fit_rejected,
          "blow-up fit is not affine (R^2 < 0.999)");
  require(fit.t1 > traj.back_time(), ErrorCode::fit_rejected,
          "fitted blow-up time precedes the data");
  return fit;
}

Trajectory normalize_blowup(const Trajectory& traj, double t1) {
  require(traj.frame().kind == FrameKind::t_frame, ErrorCode::invalid_argument,
          "blow-up normalization applies to t-frame runs");
  require(t1 > traj.back_time(), ErrorCode::invalid_argument,
          "t1 must exceed the last sample time");
  Frame frame = traj.frame();
  frame.t1 = 1.0;
  Trajectory out(frame);
  const double amp = std::sqrt(t1);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    ScalarField f = traj.field(i);
    for (auto& v : f.values()) v *= amp;
    out.push(traj.time(i) / t1, std::move(f));
  }
  return out;
}

Trajectory to_tau_frame(const Trajectory& traj) {
  require(traj.frame().kind == FrameKind::t_frame &&
              traj.frame().t1.value_or(0.0) == 1.0,
          ErrorCode::invalid_argument,
          "tau frame requires a normalized t-frame run (t1 = 1)");
  Frame frame = traj.frame();
  frame.kind = FrameKind::tau_frame;
  Trajectory out(frame);
  bool first = true;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    require(t < 1.0, ErrorCode::invalid_argument,
            "normalized run contains samples past the blow-up time");
    // tau = 0 maps to t = 0; the initial sample may sit at t > 0 when the
    // run started mid-flow, which is fine: tau just starts positive.
    (void)first;
    first = false;
    out.push(t_to_tau(t), utilde_to_v(traj.field(i), t));
  }
  return out;
}

TauRunResult evolve_tau_renormalized(const ScalarField& initial_v,
                                     const SourceTerm& source,
                                     const EvolveOptions& opts,
                                     double fit_fraction) {
  Frame frame;
  frame.kind = FrameKind::t_frame;
  EvolveResult run =
      evolve(frame, initial_v, source, 0.0, 1e12, opts);
  require(run.reason == StopReason::blowup_detected, ErrorCode::fit_rejected,
          "t-frame run did not reach the blow-up threshold");
  BlowupFit fit = estimate_blowup_time(run.trajectory, fit_fraction);

  TauRunResult out{Trajectory(frame), Trajectory(frame), fit,
                   source.with_times_scaled(1.0 / fit.t1),
                   run.steps_accepted};
  out.t_trajectory = normalize_blowup(run.trajectory, fit.t1);
  out.tau_trajectory = to_tau_frame(out.t_trajectory);
  return out;
}

}  // namespace psce
