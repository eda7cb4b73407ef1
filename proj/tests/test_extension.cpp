#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "core/evolution.hpp"
#include "core/extension.hpp"
#include "doctest.h"

using namespace psce;

namespace {

ScalarField constant_field(const TorusGrid& g, double c) {
  return ScalarField(g, std::vector<double>(g.size(), c));
}

/// Normalized t-frame run u^ = (1 - t)^p pushed close to t = 1, sampled
/// geometrically in 1 - t so the tail stays resolved for the interpolant.
Trajectory synthetic_run(const TorusGrid& g, double p, double t_last) {
  Frame frame;
  frame.kind = FrameKind::t_frame;
  frame.t1 = 1.0;
  Trajectory traj(frame);
  const double gap_last = 1.0 - t_last;
  for (int i = 0; i < 400; ++i) {
    const double frac = static_cast<double>(i) / 399.0;
    const double t = 1.0 - std::pow(gap_last, frac);  // 0 down to t_last
    traj.push(t, constant_field(g, std::pow(1.0 - t, p)));
  }
  return traj;
}

}  // namespace

TEST_CASE("omega estimate closed form") {
  TorusGrid g(2, 16);
  ScalarField u = constant_field(g, 2.0);
  ScalarField w = omega_estimate(u, 2.9, 3.0, 3);
  const double expect = 2.0 * std::sqrt(3.0 / 2.9 - 1.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(w[i] == doctest::Approx(expect).epsilon(1e-13));
  CHECK_THROWS_AS(omega_estimate(u, 3.0, 3.0, 3), Error);
}

TEST_CASE("boundary mean curvature closed form") {
  TorusGrid g(2, 16);
  ScalarField u = constant_field(g, 4.0);
  // H = (n-1)/(r u), sup attained at the minimum of u.
  CHECK(boundary_mean_curvature(u, 2.0, 3) == doctest::Approx(0.25));
}

TEST_CASE("extension report on the closed-form blow-up solution") {
  // Evolve the constant scenario, normalize, and post-process; every
  // omega-estimate must approach the exact profile omega = sqrt(2).
  TorusGrid g(2, 32);
  Frame frame;
  SourceTerm f = SourceTerm::constant(0.5);
  EvolveOptions opts;
  opts.integrate.rel_tol = 1e-10;
  opts.integrate.abs_tol = 1e-12;
  opts.integrate.blowup_threshold = 1e4;
  EvolveResult run = evolve(frame, constant_field(g, 1.0), f, 0.5, 3.0, opts);
  REQUIRE(run.reason == StopReason::blowup_detected);
  BlowupFit fit = estimate_blowup_time(run.trajectory);
  Trajectory norm = normalize_blowup(run.trajectory, fit.t1);

  ExtensionReport rep = build_extension_report(norm);
  REQUIRE(rep.omega_estimates.size() == 3);
  const double root2 = std::sqrt(2.0);
  CHECK(rep.omega_mean == doctest::Approx(root2).epsilon(1e-6));
  for (const ScalarField& w : rep.omega_estimates) {
    CHECK(w.max() == doctest::Approx(root2).epsilon(1e-5));
    CHECK(w.min() == doctest::Approx(root2).epsilon(1e-5));
  }
  // Successive estimates form a Cauchy sequence: factor >= 3 shrink, unless
  // both differences already sit at the rounding floor.
  REQUIRE(rep.cauchy_diffs.size() >= 2);
  CHECK((rep.cauchy_diffs[1] * 3.0 <= rep.cauchy_diffs[0] ||
         rep.cauchy_diffs[1] <= 1e-10));

  CHECK(rep.u_exponent == doctest::Approx(-0.5).epsilon(0.04));
  CHECK(rep.H_exponent == doctest::Approx(0.5).epsilon(0.1));
  CHECK(rep.rtilde_total > 0.0);
  CHECK(rep.tail_fraction < 0.02);
}

TEST_CASE("extension report on synthetic square-root data") {
  TorusGrid g(1, 16);
  Trajectory traj = synthetic_run(g, -0.5, 1.0 - 1e-6);
  ExtensionReport rep = build_extension_report(traj);
  CHECK(rep.u_exponent == doctest::Approx(-0.5).epsilon(0.02));
  CHECK(rep.omega_mean > 0.0);
  CHECK(rep.rtilde_total > 0.0);
}

TEST_CASE("strongly divergent tails are rejected") {
  TorusGrid g(1, 16);
  Trajectory traj = synthetic_run(g, -1.2, 1.0 - 1e-6);
  CHECK_THROWS_AS(build_extension_report(traj), Error);
}

TEST_CASE("report requires a normalized run") {
  TorusGrid g(1, 16);
  Frame frame;  // t-frame without t1 = 1 metadata
  Trajectory traj(frame);
  for (int i = 0; i < 20; ++i)
    traj.push(0.05 * i, constant_field(g, 1.0));
  CHECK_THROWS_AS(build_extension_report(traj), Error);
}
