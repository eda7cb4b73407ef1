#include "core/csf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace psce {

namespace {

void check_curve_grid(const TorusGrid& g) {
  require(g.dim() == 1 && g.period() == TorusGrid::default_period(),
          ErrorCode::invalid_argument,
          "curve flows live on the 1-torus with period 2 pi");
}

}  // namespace

ScalarField support_circle(const TorusGrid& grid, double R) {
  check_curve_grid(grid);
  require(R > 0.0, ErrorCode::invalid_argument, "circle radius must be > 0");
  return ScalarField(grid, std::vector<double>(grid.size(), R));
}

ScalarField support_ellipse(const TorusGrid& grid, double a, double b) {
  check_curve_grid(grid);
  require(a > 0.0 && b > 0.0, ErrorCode::invalid_argument,
          "ellipse semi-axes must be > 0");
  ScalarField S(grid);
  const auto& th = grid.axis_coordinates();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double c = std::cos(th[i]), s = std::sin(th[i]);
    S[i] = std::sqrt(a * a * c * c + b * b * s * s);
  }
  return S;
}

ScalarField curvature_of_support(const ScalarField& S) {
  const TorusGrid& g = S.grid();
  check_curve_grid(g);
  ScalarField den = g.laplacian(S);
  for (std::size_t i = 0; i < g.size(); ++i) den[i] += S[i];
  require(den.min() > 0.0, ErrorCode::convexity_lost,
          "curve is not strictly convex (S_thetatheta + S <= 0)");
  ScalarField k(g);
  for (std::size_t i = 0; i < g.size(); ++i) k[i] = 1.0 / den[i];
  return k;
}

double curve_area(const ScalarField& S) {
  const TorusGrid& g = S.grid();
  check_curve_grid(g);
  ScalarField Sth = g.gradient(S, 0);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    s += S[i] * S[i] - Sth[i] * Sth[i];
  return 0.5 * s * g.cell_weight();
}

EvolveResult csf_evolve_support(const ScalarField& S0, double t_end,
                                const EvolveOptions& opts) {
  const TorusGrid& g = S0.grid();
  check_curve_grid(g);
  curvature_of_support(S0);  // validates strict convexity
  const double extinction = curve_area(S0) / (2.0 * std::numbers::pi);
  require(t_end < extinction, ErrorCode::invalid_argument,
          "t_end must precede the extinction time A(0)/(2 pi)");

  const std::size_t m = g.size();
  std::vector<double> lap(m);
  OdeRhs rhs = [&](double, const std::vector<double>& y,
                   std::vector<double>& out) {
    g.laplacian_inplace(y.data(), out.data());
    std::swap(lap, out);
    for (std::size_t i = 0; i < m; ++i) out[i] = -1.0 / (lap[i] + y[i]);
  };
  std::vector<double> den(m);
  StateGuard guard = [&](const std::vector<double>& y) {
    g.laplacian_inplace(y.data(), den.data());
    for (std::size_t i = 0; i < m; ++i)
      if (!(den[i] + y[i] > 0.0) || !(y[i] > 0.0)) return false;
    return true;
  };
  // Stop on runaway curvature rather than field size: S shrinks to 0.
  StopMeasure stop = [&](const std::vector<double>& y) {
    g.laplacian_inplace(y.data(), den.data());
    double kmax = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      kmax = std::max(kmax, 1.0 / (den[i] + y[i]));
    return kmax;
  };

  Frame frame;  // plain time variable; stored as a t-frame record
  EvolveResult res{Trajectory(frame)};
  Trajectory& traj = res.trajectory;
  std::size_t stride = 1, accepted = 0;
  double last_t = 0.0;
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

  std::vector<double> y(S0.values().begin(), S0.values().end());
  IntegrateResult ir =
      integrate_dopri(rhs, y, 0.0, t_end, opts.integrate, guard, stop, sink);
  if (traj.back_time() < last_t) traj.push(last_t, ScalarField(g, last_y));
  require(ir.reason != StopReason::guard_failed, ErrorCode::convexity_lost,
          "support flow lost strict convexity");
  res.reason = ir.reason;
  res.steps_accepted = ir.steps_accepted;
  res.steps_rejected = ir.steps_rejected;
  return res;
}

EvolveResult csf_evolve_curvature(const ScalarField& k0, double t_end,
                                  const EvolveOptions& opts) {
  check_curve_grid(k0.grid());
  Frame frame;  // k_t = k^2(k_thetatheta + k) is Eq. 2 with f = 1
  return evolve(frame, k0, SourceTerm::constant(1.0), 0.0, t_end, opts);
}

Trajectory normalized_curvature(const Trajectory& ktraj, double area0) {
  require(area0 > 0.0, ErrorCode::invalid_argument,
          "initial area must be positive");
  Trajectory out(ktraj.frame());
  for (std::size_t i = 0; i < ktraj.size(); ++i) {
    const double area = area0 - 2.0 * std::numbers::pi * ktraj.time(i);
    require(area > 0.0, ErrorCode::invalid_argument,
            "sample past the extinction time");
    const double amp = std::sqrt(area / std::numbers::pi);
    ScalarField f = ktraj.field(i);
    for (auto& v : f.values()) v *= amp;
    out.push(ktraj.time(i), std::move(f));
  }
  return out;
}

ScalarField support_from_curvature(const ScalarField& k) {
  const TorusGrid& g = k.grid();
  check_curve_grid(g);
  require(k.all_positive(), ErrorCode::invalid_argument,
          "curvature must be positive");
  // 1/k = S'' + S; in Fourier space S_m = w_m / (1 - m^2). The resonant
  // modes m = +-1 carry the closure condition and are projected out, which
  // fixes the translation gauge of the curve.
  ScalarField w(g);
  for (std::size_t i = 0; i < g.size(); ++i) w[i] = 1.0 / k[i];
  ScalarField S = g.helmholtz_solve(w, 1.0, 0.5);
  // helmholtz_solve floors the m = +-1 denominators; remove those modes by
  // subtracting their projection explicitly.
  const auto& th = g.axis_coordinates();
  double ac = 0.0, as = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    ac += S[i] * std::cos(th[i]);
    as += S[i] * std::sin(th[i]);
  }
  const double norm = 2.0 / static_cast<double>(g.size());
  ac *= norm;
  as *= norm;
  for (std::size_t i = 0; i < g.size(); ++i)
    S[i] -= ac * std::cos(th[i]) + as * std::sin(th[i]);
  return S;
}

Trajectory csf_to_torus_solution(const Trajectory& ktraj,
                                 const TorusGrid& grid2) {
  require(grid2.dim() == 2, ErrorCode::invalid_argument,
          "torus lift targets a 2-torus grid");
  const TorusGrid& g1 = ktraj.field(0).grid();
  require(grid2.points_per_axis() == g1.points_per_axis() &&
              grid2.period() == g1.period(),
          ErrorCode::grid_mismatch,
          "2-torus grid must match the curve grid per axis");
  Trajectory out(ktraj.frame());
  const int npts = g1.points_per_axis();
  for (std::size_t s = 0; s < ktraj.size(); ++s) {
    const ScalarField& k = ktraj.field(s);
    ScalarField lift(grid2);
    for (int i = 0; i < npts; ++i)
      for (int j = 0; j < npts; ++j)
        lift[static_cast<std::size_t>(i) * npts + j] = k[i];
    out.push(ktraj.time(s), std::move(lift));
  }
  return out;
}

std::vector<std::array<double, 2>> boundary_points(const ScalarField& S) {
  const TorusGrid& g = S.grid();
  check_curve_grid(g);
  ScalarField Sth = g.gradient(S, 0);
  std::vector<std::array<double, 2>> pts(g.size());
  const auto& th = g.axis_coordinates();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double c = std::cos(th[i]), s = std::sin(th[i]);
    pts[i] = {S[i] * c - Sth[i] * s, S[i] * s + Sth[i] * c};
  }
  return pts;
}

}  // namespace psce
