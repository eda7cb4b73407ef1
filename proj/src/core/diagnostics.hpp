#pragma once

#include <vector>

#include "core/source_term.hpp"
#include "core/stationary.hpp"
#include "core/trajectory.hpp"

namespace psce {

/// J(v) = integral of |grad v|^2 - f v^2 + log v over the torus.
double lyapunov_J(const ScalarField& v, const ScalarField& f);

struct JMonotoneReport {
  bool monotone = true;
  bool quantitative_ok = true;
  std::size_t worst_pair = 0;      // index k of the worst (k, k+1) pair
  double worst_violation = 0.0;    // max of J(k+1) - J(k) - tol, <= 0 when ok
  double final_J = 0.0;
  bool lower_bound_ok = true;      // J >= -sup f * M^2 * Vol + log(mu) * Vol
  std::vector<double> J;           // one value per sample
};

/// Monotonicity of J along a tau-frame run (tolerance 1e-6 |J| per pair) plus
/// the quantitative dissipation bound
///   (J_{k+1}-J_k)/dtau <= -2 int v^{-2} (dv/dtau)^2 + discretization slack.
/// Throws monotonicity_violation when `strict` and a pair violates.
JMonotoneReport check_J_monotone(const Trajectory& traj, const SourceTerm& f,
                                 bool strict = false);

struct AbReport {
  double integrated_margin = 0.0;    // min slack over all pairs and points
  double differential_margin = 0.0;  // min of the centered-difference form
  double z_max = 0.0;                // max of z = t d_t(1/u) - 1/(2u)
  std::vector<double> z_sup;         // per interior sample
};

/// Lower-barrier inequalities in the t or tau frame: integrated form on every
/// sampled pair (via the pointwise running max of sqrt(t) u), the
/// differential form by centered differences, and the z-formulation.
AbReport ab_check(const Trajectory& traj);

/// C_emp(tau) = sup v(tau) / (1/mu + inf v(tau + h)) for each sample with
/// tau + h inside the run (the later time rounds up to the next sample).
std::vector<double> harnack_ratio(const Trajectory& traj, double h, double mu);

/// No-trend test: max over the last quartile <= 2x max over the first three.
bool harnack_no_trend(const std::vector<double>& c_emp);

/// Energy structure of the linearization about a stationary profile omega.
class SimonEnergy {
 public:
  SimonEnergy(const ScalarField& omega, const ScalarField& f_t1);

  const ScalarField& omega_tilde() const { return omega_tilde_; }
  const ScalarField& f_t1() const { return f_t1_; }
  double c_convexity() const { return c_convexity_; }  // mu^2, mu = min omega

  /// M(nu) = e^{w+nu} Lap e^{w+nu} + f_t1 e^{2(w+nu)} - 1/2, w = log omega.
  ScalarField M(const ScalarField& nu) const;

  /// E(nu) = int (1/2)(e^{2(w+nu)}(|grad nu + grad w|^2 - f_t1) + nu) dV.
  double energy(const ScalarField& nu) const;

  /// Pointwise second variation in the gradient slot at z = 0:
  /// min over the grid of (e^{2w} - mu^2) |p|^2; >= 0 certifies convexity.
  double convexity_margin(const ScalarField& p) const;

 private:
  ScalarField omega_tilde_;
  ScalarField f_t1_;
  ScalarField grad_w_sq_;
  double c_convexity_;
};

struct GradientCheck {
  double lhs = 0.0;            // <M(nu), xi> by quadrature
  double rhs = 0.0;            // -dE(nu + s xi)/ds at 0, Richardson value
  double relative_error = 0.0;
  double richardson_drift = 0.0;  // |D_{1e-4} - D_{1e-5}| / scale
};

/// Verifies <M(nu), xi> = -d/ds E(nu + s xi)|_{s=0} by centered differences
/// at steps 1e-4 and 1e-5 with Richardson extrapolation.
GradientCheck simon_gradient_check(const SimonEnergy& energy,
                                   const ScalarField& nu,
                                   const ScalarField& xi);

struct NuDecayReport {
  double rate = 0.0;          // least-squares slope of log ||nu|| over the tail
  double final_norm = 0.0;
  double tail_max = 0.0;      // max ||nu|| over the fit window
  bool certified = false;     // final norm <= 1e-4, and either rate < 0 or the
                              // whole tail already sits below 1e-4
  double f_decay_delta = 0.0; // smallest delta with ||(f-f_t1)v^2|| <= delta e^{T-tau}
  std::vector<double> nu_norms;
};

/// nu = log(v/omega) along a tau-frame run; decay is measured on the last
/// quartile. Throws tail_not_converged when the tail is not near omega.
NuDecayReport nu_decay(const Trajectory& traj, const StationaryState& omega,
                       const SourceTerm& f);

}  // namespace psce
