#include "core/extension.hpp"

#include <algorithm>
#include <cmath>

#include "core/frames.hpp"

namespace psce {

ScalarField omega_estimate(const ScalarField& u, double r, double r1, int n) {
  require(n >= 3, ErrorCode::invalid_argument, "omega_estimate requires n >= 3");
  require(r > 0.0 && r < r1, ErrorCode::invalid_argument,
          "omega_estimate requires 0 < r < r1");
  const double amp = std::sqrt(std::pow(r1 / r, n - 2) - 1.0);
  ScalarField out = u;
  for (auto& v : out.values()) v *= amp;
  return out;
}

double boundary_mean_curvature(const ScalarField& u, double r, int n) {
  require(r > 0.0, ErrorCode::invalid_argument, "boundary requires r > 0");
  require(u.all_positive(), ErrorCode::invalid_argument,
          "boundary mean curvature requires u > 0");
  return (n - 1) / (r * u.min());
}

namespace {

/// u(r) on Sigma reconstructed from the normalized t-frame run.
ScalarField u_at_r(const Trajectory& traj, double r, int n) {
  // clamp away the r <-> t roundtrip rounding at the ends of the run
  const double t =
      std::clamp(r_to_t(r, n), traj.time(0), traj.back_time());
  ScalarField ut = sample_inverse_square_at(traj, t);
  const double amp = std::pow(r, n / 2.0 - 1.0);
  for (auto& v : ut.values()) v *= amp;
  return ut;
}

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double np = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double det = np * sxx - sx * sx;
  LogFit f;
  f.slope = (np * sxy - sx * sy) / det;
  f.intercept = (sy * sxx - sx * sxy) / det;
  return f;
}

}  // namespace

ExtensionReport build_extension_report(const Trajectory& traj) {
  const Frame& frame = traj.frame();
  require(frame.kind == FrameKind::t_frame && frame.t1.value_or(0.0) == 1.0,
          ErrorCode::invalid_argument,
          "extension report needs a normalized t-frame run (t1 = 1)");
  const int n = frame.n;

  ExtensionReport rep;
  rep.r1 = t_to_r(1.0, n);
  rep.eps_levels = {1e-2, 1e-3, 1e-4};

  for (double eps : rep.eps_levels) {
    const double r = rep.r1 * (1.0 - eps);
    ScalarField u = u_at_r(traj, r, n);
    rep.H_levels.push_back(boundary_mean_curvature(u, r, n));
    rep.omega_estimates.push_back(omega_estimate(u, r, rep.r1, n));
  }
  for (std::size_t i = 1; i < rep.omega_estimates.size(); ++i) {
    const ScalarField& a = rep.omega_estimates[i - 1];
    const ScalarField& b = rep.omega_estimates[i];
    double d = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p)
      d = std::max(d, std::abs(b[p] - a[p]));
    rep.cauchy_diffs.push_back(d);
  }
  rep.omega_mean =
      rep.omega_estimates.back().grid().mean(rep.omega_estimates.back());

  // Blow-up exponent fits on log-spaced distances to r1.
  std::vector<double> dist, sup_u, sup_h;
  const int fit_pts = 25;
  for (int i = 0; i < fit_pts; ++i) {
    const double frac = static_cast<double>(i) / (fit_pts - 1);
    const double d = 1e-2 * std::pow(1e-2, frac);  // eps from 1e-2 to 1e-4
    const double r = rep.r1 * (1.0 - d);
    ScalarField u = u_at_r(traj, r, n);
    dist.push_back(rep.r1 - r);
    sup_u.push_back(u.max());
    sup_h.push_back(boundary_mean_curvature(u, r, n));
  }
  const LogFit ufit = fit_loglog(dist, sup_u);
  const LogFit hfit = fit_loglog(dist, sup_h);
  rep.u_exponent = ufit.slope;
  rep.H_exponent = hfit.slope;
  require(rep.u_exponent > -1.0, ErrorCode::divergent_tail,
          "blow-up exponent makes the arc-length integral diverge");

  // Arc-length change of variables: cumulative trapezoid of u in r, refined
  // geometrically toward r1 and cut at r1 (1 - 1e-4).
  const double t_lo = std::max(traj.time(0), 1e-8);
  const double r_lo = t_to_r(t_lo, n);
  const double d_hi = rep.r1 - r_lo;
  const double d_lo = 1e-4 * rep.r1;
  const int nr = 200;
  std::vector<double> rs(nr);
  for (int i = 0; i < nr; ++i) {
    const double frac = static_cast<double>(i) / (nr - 1);
    rs[i] = rep.r1 - d_hi * std::pow(d_lo / d_hi, frac);
  }
  ScalarField prev = u_at_r(traj, rs[0], n);
  std::vector<double> accum(prev.size(), 0.0);
  rep.r_samples.push_back(rs[0]);
  rep.rtilde_max.push_back(0.0);
  for (int i = 1; i < nr; ++i) {
    ScalarField cur = u_at_r(traj, rs[i], n);
    const double dr = rs[i] - rs[i - 1];
    double mx = 0.0;
    for (std::size_t p = 0; p < accum.size(); ++p) {
      accum[p] += 0.5 * (prev[p] + cur[p]) * dr;
      mx = std::max(mx, accum[p]);
    }
    rep.r_samples.push_back(rs[i]);
    rep.rtilde_max.push_back(mx);
    prev = std::move(cur);
  }
  rep.rtilde_total = rep.rtilde_max.back();

  // Estimated contribution of the uncomputed sliver [r1(1-1e-4), r1] from
  // the fitted power law sup u ~ C (r1 - r)^p, p > -1.
  const double p = rep.u_exponent;
  const double C = std::exp(ufit.intercept);
  const double tail = C / (1.0 + p) * std::pow(d_lo, 1.0 + p);
  rep.tail_fraction = tail / (rep.rtilde_total + tail);
  return rep;
}

}  // namespace psce
