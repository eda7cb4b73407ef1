#include "core/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace psce {

double lyapunov_J(const ScalarField& v, const ScalarField& f) {
  const TorusGrid& g = v.grid();
  g.check_field(f);
  require(v.all_positive(), ErrorCode::invalid_argument,
          "lyapunov_J requires v > 0");
  ScalarField gs = g.grad_sq(v);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    s += gs[i] - f[i] * v[i] * v[i] + std::log(v[i]);
  return s * g.cell_weight();
}

JMonotoneReport check_J_monotone(const Trajectory& traj, const SourceTerm& f,
                                 bool strict) {
  require(traj.frame().kind == FrameKind::tau_frame,
          ErrorCode::invalid_argument, "J monotonicity is a tau-frame check");
  require(f.monotone_flag(), ErrorCode::invalid_argument,
          "J monotonicity requires a source with the monotone flag");
  require(traj.size() >= 2, ErrorCode::span_too_short,
          "J monotonicity needs at least two samples");

  const TorusGrid& g = traj.field(0).grid();
  JMonotoneReport rep;
  rep.J.reserve(traj.size());
  double mu = traj.diag(0).min, M = traj.diag(0).max;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = tau_to_t(traj.time(i));
    rep.J.push_back(lyapunov_J(traj.field(i), f.at(g, t)));
    mu = std::min(mu, traj.diag(i).min);
    M = std::max(M, traj.diag(i).max);
  }
  rep.final_J = rep.J.back();

  double worst = -1e300;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const double tol = 1e-6 * std::abs(rep.J[k]);
    const double viol = rep.J[k + 1] - rep.J[k] - tol;
    if (viol > worst) {
      worst = viol;
      rep.worst_pair = k;
    }
    if (viol > 0.0) rep.monotone = false;

    // Quantitative dissipation: dJ/dtau <= -2 int v^{-2} (dv/dtau)^2, with
    // slack covering the finite-difference error of both sides.
    const double dtau = traj.time(k + 1) - traj.time(k);
    const ScalarField& a = traj.field(k);
    const ScalarField& b = traj.field(k + 1);
    double dissip = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double vm = 0.5 * (a[i] + b[i]);
      const double dv = (b[i] - a[i]) / dtau;
      dissip += dv * dv / (vm * vm);
    }
    dissip *= 2.0 * g.cell_weight();
    const double lhs = (rep.J[k + 1] - rep.J[k]) / dtau;
    const double slack = 1e-2 * (1.0 + dissip) + 1e-6 * std::abs(lhs);
    if (lhs > -dissip + slack) rep.quantitative_ok = false;
  }
  rep.worst_violation = worst;

  const double vol = g.volume();
  double supf = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    supf = std::max(supf, f.sup(tau_to_t(traj.time(i))));
  const double lower = -supf * M * M * vol + std::log(mu) * vol;
  rep.lower_bound_ok = true;
  for (double j : rep.J)
    if (j < lower - 1e-8 * (1.0 + std::abs(lower))) rep.lower_bound_ok = false;

  if (strict && !rep.monotone)
    fail(ErrorCode::monotonicity_violation,
         "J increased between samples " + std::to_string(rep.worst_pair) +
             " and " + std::to_string(rep.worst_pair + 1));
  return rep;
}

namespace {

// The integrated lower-barrier inequalities in both frames reduce to the
// pointwise monotonicity of g = sqrt(t) u~ (t frame) or equivalently
// g = e^{tau/2} sqrt(1-e^{-tau}) v (tau frame); the pair slack is
// (g_j - g_i)/denom_j with denom the coefficient of the later sample.
void frame_g(const Trajectory& traj, std::size_t i, std::vector<double>& g,
             double& denom) {
  const ScalarField& u = traj.field(i);
  double amp = 0.0;
  if (traj.frame().kind == FrameKind::t_frame) {
    amp = std::sqrt(traj.time(i));
    denom = amp > 0.0 ? amp : 1.0;
  } else {
    const double tau = traj.time(i);
    amp = std::exp(0.5 * tau) * std::sqrt(-std::expm1(-tau));
    denom = amp > 0.0 ? amp : 1.0;
  }
  g.resize(u.size());
  for (std::size_t p = 0; p < u.size(); ++p) g[p] = amp * u[p];
}

}  // namespace

AbReport ab_check(const Trajectory& traj) {
  const FrameKind kind = traj.frame().kind;
  require(kind == FrameKind::t_frame || kind == FrameKind::tau_frame,
          ErrorCode::invalid_argument,
          "lower-barrier check applies to t- or tau-frame runs");
  require(traj.size() >= 3, ErrorCode::span_too_short,
          "lower-barrier check needs at least three samples");

  AbReport rep;
  const std::size_t m = traj.field(0).size();

  // Integrated form over all pairs via a pointwise running maximum.
  std::vector<double> g, prefmax(m, -1e300);
  double denom = 1.0;
  double margin = 1e300;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    frame_g(traj, j, g, denom);
    if (j > 0)
      for (std::size_t p = 0; p < m; ++p)
        margin = std::min(margin, (g[p] - prefmax[p]) / denom);
    for (std::size_t p = 0; p < m; ++p)
      prefmax[p] = std::max(prefmax[p], g[p]);
  }
  rep.integrated_margin = margin;

  // Differential form and the z-formulation by centered differences. In the
  // tau frame the differential inequality reads dv/dtau + v/(2t) >= 0 with
  // t = 1 - e^{-tau}; in the t frame it is t du/dt + u/2 >= 0.
  double dmargin = 1e300, zmax = -1e300;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const ScalarField& um = traj.field(i - 1);
    const ScalarField& u0 = traj.field(i);
    const ScalarField& up = traj.field(i + 1);
    const double dt2 = traj.time(i + 1) - traj.time(i - 1);
    const double ti = traj.time(i);
    const double t_of_i =
        kind == FrameKind::t_frame ? ti : tau_to_t(ti);
    double zi = -1e300;
    for (std::size_t p = 0; p < m; ++p) {
      const double du = (up[p] - um[p]) / dt2;
      if (kind == FrameKind::t_frame) {
        dmargin = std::min(dmargin, ti * du + 0.5 * u0[p]);
        const double dw = (1.0 / up[p] - 1.0 / um[p]) / dt2;
        zi = std::max(zi, ti * dw - 0.5 / u0[p]);
      } else {
        dmargin = std::min(dmargin, du + 0.5 * u0[p] / t_of_i);
        // z in the underlying t frame: map v back to u~ at the three times.
        const double tm = tau_to_t(traj.time(i - 1));
        const double tp = tau_to_t(traj.time(i + 1));
        const double wm = std::sqrt(1.0 - tm) / um[p];
        const double wp = std::sqrt(1.0 - tp) / up[p];
        const double w0 = std::sqrt(1.0 - t_of_i) / u0[p];
        zi = std::max(zi, t_of_i * (wp - wm) / (tp - tm) - 0.5 * w0);
      }
    }
    rep.z_sup.push_back(zi);
    zmax = std::max(zmax, zi);
  }
  rep.differential_margin = dmargin;
  rep.z_max = zmax;
  return rep;
}

std::vector<double> harnack_ratio(const Trajectory& traj, double h,
                                  double mu) {
  require(traj.frame().kind == FrameKind::tau_frame,
          ErrorCode::invalid_argument, "Harnack ratio is a tau-frame check");
  require(h > 0.0 && mu > 0.0, ErrorCode::invalid_argument,
          "Harnack ratio requires h > 0 and mu > 0");
  require(traj.back_time() - traj.time(0) >= h, ErrorCode::span_too_short,
          "trajectory shorter than the Harnack offset h");

  std::vector<double> c;
  std::size_t j = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double target = traj.time(i) + h;
    if (target > traj.back_time()) break;
    while (traj.time(j) < target) ++j;
    c.push_back(traj.diag(i).max / (1.0 / mu + traj.diag(j).min));
  }
  require(!c.empty(), ErrorCode::span_too_short,
          "no sample pairs separated by h");
  return c;
}

bool harnack_no_trend(const std::vector<double>& c_emp) {
  if (c_emp.size() < 4) return true;
  const std::size_t cut = (c_emp.size() * 3) / 4;
  const double early = *std::max_element(c_emp.begin(), c_emp.begin() + cut);
  const double late = *std::max_element(c_emp.begin() + cut, c_emp.end());
  return late <= 2.0 * early;
}

SimonEnergy::SimonEnergy(const ScalarField& omega, const ScalarField& f_t1)
    : omega_tilde_(omega.grid()),
      f_t1_(f_t1),
      grad_w_sq_(omega.grid()),
      c_convexity_(0.0) {
  const TorusGrid& g = omega.grid();
  g.check_field(f_t1);
  require(omega.all_positive(), ErrorCode::invalid_argument,
          "Simon energy requires omega > 0");
  for (std::size_t i = 0; i < g.size(); ++i)
    omega_tilde_[i] = std::log(omega[i]);
  grad_w_sq_ = g.grad_sq(omega_tilde_);
  const double mu = omega.min();
  c_convexity_ = mu * mu;
}

ScalarField SimonEnergy::M(const ScalarField& nu) const {
  const TorusGrid& g = omega_tilde_.grid();
  g.check_field(nu);
  ScalarField e(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    e[i] = std::exp(omega_tilde_[i] + nu[i]);
  ScalarField lap = g.laplacian(e);
  ScalarField out(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = e[i] * lap[i] + f_t1_[i] * e[i] * e[i] - 0.5;
  return out;
}

double SimonEnergy::energy(const ScalarField& nu) const {
  const TorusGrid& g = omega_tilde_.grid();
  g.check_field(nu);
  ScalarField total(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    total[i] = omega_tilde_[i] + nu[i];
  ScalarField gs = g.grad_sq(total);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e2 = std::exp(2.0 * total[i]);
    s += 0.5 * (e2 * (gs[i] - f_t1_[i]) + nu[i]);
  }
  return s * g.cell_weight();
}

double SimonEnergy::convexity_margin(const ScalarField& p) const {
  const TorusGrid& g = omega_tilde_.grid();
  g.check_field(p);
  double margin = 1e300;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e2 = std::exp(2.0 * omega_tilde_[i]);
    margin = std::min(margin, (e2 - c_convexity_) * p[i] * p[i]);
  }
  return margin;
}

GradientCheck simon_gradient_check(const SimonEnergy& energy,
                                   const ScalarField& nu,
                                   const ScalarField& xi) {
  const TorusGrid& g = nu.grid();
  g.check_field(xi);
  GradientCheck chk;
  chk.lhs = g.inner(energy.M(nu), xi);

  auto fd = [&](double h) {
    ScalarField plus(g), minus(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      plus[i] = nu[i] + h * xi[i];
      minus[i] = nu[i] - h * xi[i];
    }
    return -(energy.energy(plus) - energy.energy(minus)) / (2.0 * h);
  };
  const double d4 = fd(1e-4);
  const double d5 = fd(1e-5);
  // Centered differences are O(h^2): Richardson across one decade.
  chk.rhs = (100.0 * d5 - d4) / 99.0;
  const double scale =
      std::max({std::abs(chk.lhs), std::abs(chk.rhs), 1e-12});
  chk.relative_error = std::abs(chk.lhs - chk.rhs) / scale;
  chk.richardson_drift = std::abs(d4 - d5) / scale;
  return chk;
}

NuDecayReport nu_decay(const Trajectory& traj, const StationaryState& omega,
                       const SourceTerm& f) {
  require(traj.frame().kind == FrameKind::tau_frame,
          ErrorCode::invalid_argument, "nu decay is a tau-frame check");
  require(traj.size() >= 8, ErrorCode::span_too_short,
          "nu decay needs at least eight samples");
  const TorusGrid& g = traj.field(0).grid();
  g.check_field(omega.omega);

  NuDecayReport rep;
  rep.nu_norms.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const ScalarField& v = traj.field(i);
    double norm = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p)
      norm = std::max(norm, std::abs(std::log(v[p] / omega.omega[p])));
    rep.nu_norms.push_back(norm);
  }
  rep.final_norm = rep.nu_norms.back();

  const std::size_t tail = (traj.size() * 3) / 4;
  for (std::size_t i = tail; i < traj.size(); ++i)
    require(rep.nu_norms[i] < 0.5, ErrorCode::tail_not_converged,
            "run tail is not near the stationary profile");

  // F-decay hypothesis on the tail: ||(f - f_t1) v^2|| <= delta e^{T - tau}.
  const ScalarField f_t1 =
      f.limit() ? *f.limit() : f.at(g, 1.0);
  const double T = traj.time(tail);
  for (std::size_t i = tail; i < traj.size(); ++i) {
    const ScalarField fv = f.at(g, tau_to_t(traj.time(i)));
    const ScalarField& v = traj.field(i);
    double norm = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p)
      norm = std::max(norm, std::abs((fv[p] - f_t1[p]) * v[p] * v[p]));
    rep.f_decay_delta =
        std::max(rep.f_decay_delta, norm * std::exp(traj.time(i) - T));
  }

  // Fit log ||nu|| against tau over the resolvable part of the decay: once
  // the norm has dropped to its noise floor, later samples only measure the
  // renormalization noise (which grows like e^{+tau}), so the fit window
  // ends where the norm first falls within 10x of the run minimum. Runs
  // that never reach their floor are fitted on the plain last quartile.
  const double nu_min =
      *std::min_element(rep.nu_norms.begin(), rep.nu_norms.end());
  std::size_t signal_end = traj.size();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (rep.nu_norms[i] < 10.0 * nu_min) {
      signal_end = i + 1;
      break;
    }
  }
  if (signal_end < 8) signal_end = traj.size();
  const std::size_t fit_begin = (signal_end * 3) / 4;

  bool all_tiny = true;
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t np = 0;
  for (std::size_t i = fit_begin; i < signal_end; ++i) {
    if (rep.nu_norms[i] > 1e-14) all_tiny = false;
    const double y = std::log(std::max(rep.nu_norms[i], 1e-300));
    const double t = traj.time(i);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++np;
  }
  if (all_tiny) {
    rep.rate = 0.0;
    rep.certified = true;
    return rep;
  }
  const double det = np * stt - st * st;
  rep.rate = det > 0.0 ? (np * sty - st * sy) / det : 0.0;
  rep.tail_max = *std::max_element(rep.nu_norms.begin() +
                                       static_cast<std::ptrdiff_t>(tail),
                                   rep.nu_norms.end());
  // A tail that is entirely below tolerance has already converged; the slope
  // there only measures the noise floor of the renormalization, so it does
  // not gate certification.
  rep.certified = rep.final_norm <= 1e-4 &&
                  (rep.rate < 0.0 || rep.tail_max <= 1e-4);
  return rep;
}

}  // namespace psce
