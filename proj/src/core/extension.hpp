#pragma once

#include <vector>

#include "core/trajectory.hpp"

namespace psce {

/// Pointwise u * sqrt((r1/r)^{n-2} - 1), the blow-up profile estimator of
/// the boundary extension; rejects r >= r1.
ScalarField omega_estimate(const ScalarField& u, double r, double r1, int n);

/// Sup over Sigma of the boundary mean curvature H = (n-1)/(r u).
double boundary_mean_curvature(const ScalarField& u, double r, int n);

struct ExtensionReport {
  double r1 = 0.0;
  std::vector<double> eps_levels;        // r = r1 (1 - eps)
  std::vector<ScalarField> omega_estimates;
  std::vector<double> cauchy_diffs;      // max-norm successive differences
  double omega_mean = 0.0;               // mean of the finest estimate
  std::vector<double> H_levels;          // sup H at each eps level
  double u_exponent = 0.0;               // fit of sup u ~ (r1-r)^p, target -0.5
  double H_exponent = 0.0;               // fit of sup H ~ (r1-r)^p, target 0.5
  std::vector<double> r_samples;
  std::vector<double> rtilde_max;        // spatial max of the arc-length map
  double rtilde_total = 0.0;
  double tail_fraction = 0.0;            // share contributed past r1(1-1e-4)
};

/// Post-process a normalized t-frame run (t1 = 1) into the boundary
/// extension evidence: omega-estimates at eps in {1e-2, 1e-3, 1e-4}, the
/// arc-length change of variables rtilde by cumulative trapezoid in r, and
/// the blow-up exponent fits. The r-frame is reconstructed from the stored
/// samples; it is never integrated directly. Throws divergent_tail when the
/// fitted blow-up exponent makes the arc-length integral non-integrable.
ExtensionReport build_extension_report(const Trajectory& traj);

}  // namespace psce
