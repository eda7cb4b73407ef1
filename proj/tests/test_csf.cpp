#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "core/csf.hpp"
#include "doctest.h"

using namespace psce;

namespace {

constexpr double kPi = std::numbers::pi;

EvolveOptions tight_options() {
  EvolveOptions o;
  o.integrate.rel_tol = 1e-11;
  o.integrate.abs_tol = 1e-13;
  return o;
}

}  // namespace

TEST_CASE("support functions and curvatures of model curves") {
  TorusGrid g(1, 256);
  const auto& th = g.axis_coordinates();

  ScalarField sc = support_circle(g, 2.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(sc[i] == doctest::Approx(2.0).epsilon(1e-14));
  ScalarField kc = curvature_of_support(sc);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(kc[i] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(curve_area(sc) == doctest::Approx(4.0 * kPi).epsilon(1e-12));

  const double a = 2.0, b = 1.0;
  ScalarField se = support_ellipse(g, a, b);
  ScalarField ke = curvature_of_support(se);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double expect =
        std::sqrt(a * a * std::cos(th[i]) * std::cos(th[i]) +
                  b * b * std::sin(th[i]) * std::sin(th[i]));
    CHECK(se[i] == doctest::Approx(expect).epsilon(1e-13));
    // 1/k = a^2 b^2 / S^3 for the ellipse.
    CHECK(ke[i] ==
          doctest::Approx(expect * expect * expect / (a * a * b * b))
              .epsilon(1e-9));
  }
  CHECK(curve_area(se) == doctest::Approx(kPi * a * b).epsilon(1e-12));
}

TEST_CASE("non-convex support data is rejected") {
  TorusGrid g(1, 128);
  const auto& th = g.axis_coordinates();
  ScalarField S(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    S[i] = 1.0 + 0.5 * std::cos(2.0 * th[i]);  // S'' + S dips below zero
  CHECK_THROWS_AS(curvature_of_support(S), Error);
}

TEST_CASE("shrinking circle follows the closed form") {
  TorusGrid g(1, 256);
  ScalarField S0 = support_circle(g, 1.0);
  EvolveResult run = csf_evolve_support(S0, 0.45, tight_options());
  REQUIRE(run.reason == StopReason::reached_end);
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    const double expect = std::sqrt(1.0 - 2.0 * run.trajectory.time(i));
    CHECK(run.trajectory.diag(i).max == doctest::Approx(expect).epsilon(1e-9));
    CHECK(run.trajectory.diag(i).min == doctest::Approx(expect).epsilon(1e-9));
  }
  // Requesting evolution past extinction is rejected up front.
  CHECK_THROWS_AS(csf_evolve_support(S0, 0.6, tight_options()), Error);
}

TEST_CASE("area decreases at exactly 2 pi per unit time") {
  TorusGrid g(1, 256);
  ScalarField S0 = support_ellipse(g, 2.0, 1.0);
  const double area0 = curve_area(S0);
  EvolveResult run = csf_evolve_support(S0, 0.8, tight_options());
  REQUIRE(run.reason == StopReason::reached_end);
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    const double expect = area0 - 2.0 * kPi * run.trajectory.time(i);
    CHECK(curve_area(run.trajectory.field(i)) ==
          doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("support and curvature formulations stay dual along the flow") {
  TorusGrid g(1, 256);
  ScalarField S0 = support_ellipse(g, 1.5, 1.0);
  EvolveResult run = csf_evolve_support(S0, 0.5, tight_options());
  for (std::size_t i = 0; i < run.trajectory.size();
       i += run.trajectory.size() / 6 + 1) {
    const ScalarField& S = run.trajectory.field(i);
    ScalarField k = curvature_of_support(S);
    ScalarField Stt = S.grid().laplacian(S);
    for (std::size_t p = 0; p < g.size(); ++p)
      CHECK(k[p] * (Stt[p] + S[p]) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("support_from_curvature inverts curvature_of_support") {
  TorusGrid g(1, 256);
  ScalarField S = support_ellipse(g, 2.0, 1.0);
  ScalarField k = curvature_of_support(S);
  ScalarField back = support_from_curvature(k);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(back[i] == doctest::Approx(S[i]).epsilon(1e-8));
}

TEST_CASE("normalized curvature of a circle is identically one") {
  TorusGrid g(1, 128);
  ScalarField S0 = support_circle(g, 1.0);
  const double area0 = curve_area(S0);
  EvolveResult run = csf_evolve_curvature(curvature_of_support(S0), 0.45,
                                          tight_options());
  Trajectory norm = normalized_curvature(run.trajectory, area0);
  for (std::size_t i = 0; i < norm.size(); ++i) {
    CHECK(norm.diag(i).max == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(norm.diag(i).min == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("extinction time recovered from the curvature blow-up fit") {
  TorusGrid g(1, 256);
  ScalarField k0 = curvature_of_support(support_circle(g, 1.0));
  EvolveOptions opts = tight_options();
  opts.integrate.blowup_threshold = 2e4;
  EvolveResult run = csf_evolve_curvature(k0, 0.4999999, opts);
  BlowupFit fit = estimate_blowup_time(run.trajectory);
  CHECK(fit.t1 == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("lift to the torus copies curvature along the first axis") {
  TorusGrid g(1, 64);
  ScalarField k0 = curvature_of_support(support_ellipse(g, 2.0, 1.0));
  EvolveResult run = csf_evolve_curvature(k0, 0.3, tight_options());
  TorusGrid g2(2, 64);
  Trajectory lift = csf_to_torus_solution(run.trajectory, g2);
  REQUIRE(lift.size() == run.trajectory.size());
  CHECK(lift.frame().kind == FrameKind::t_frame);
  const std::size_t n = 64;
  for (std::size_t s = 0; s < lift.size(); s += lift.size() / 4 + 1) {
    const ScalarField& u = lift.field(s);
    const ScalarField& k = run.trajectory.field(s);
    for (std::size_t i = 0; i < g2.size(); ++i)
      CHECK(u[i] == doctest::Approx(k[i / n]).epsilon(1e-14));
  }
}

TEST_CASE("boundary points of a circle lie on the circle") {
  TorusGrid g(1, 128);
  ScalarField S = support_circle(g, 1.5);
  auto pts = boundary_points(S);
  REQUIRE(pts.size() == g.size());
  for (const auto& p : pts)
    CHECK(std::hypot(p[0], p[1]) == doctest::Approx(1.5).epsilon(1e-12));
}
