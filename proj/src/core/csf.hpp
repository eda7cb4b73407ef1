#pragma once

#include <array>
#include <vector>

#include "core/evolution.hpp"

namespace psce {

/// Support function of a circle of radius R about the origin.
ScalarField support_circle(const TorusGrid& grid, double R);

/// Support function of the axis-aligned ellipse with semi-axes a, b:
/// S(theta) = sqrt(a^2 cos^2 theta + b^2 sin^2 theta).
ScalarField support_ellipse(const TorusGrid& grid, double a, double b);

/// Curvature k = 1/(S_thetatheta + S); throws convexity_lost when the
/// denominator is not strictly positive.
ScalarField curvature_of_support(const ScalarField& S);

/// Enclosed area A = (1/2) integral of (S^2 - S_theta^2).
double curve_area(const ScalarField& S);

/// Shrink a strictly convex curve by its support-function flow
/// S_t = -1/(S_thetatheta + S). Requires t_end < A(0)/(2 pi).
EvolveResult csf_evolve_support(const ScalarField& S0, double t_end,
                                const EvolveOptions& opts = {});

/// The same flow in the normal-angle curvature formulation
/// k_t = k^2 (k_thetatheta + k), which is the t-frame equation with f = 1.
EvolveResult csf_evolve_curvature(const ScalarField& k0, double t_end,
                                  const EvolveOptions& opts = {});

/// k-tilde = sqrt(A(t)/pi) k with A(t) = A(0) - 2 pi t.
Trajectory normalized_curvature(const Trajectory& ktraj, double area0);

/// Invert 1/k = S_thetatheta + S spectrally. The +-1 modes of 1/k must
/// vanish for a closed curve (closure condition); they are projected out.
ScalarField support_from_curvature(const ScalarField& k);

/// Lift a curvature run to the 2-torus: u~(theta1, theta2, t) = k(theta1, t),
/// a t-frame solution with f = 1.
Trajectory csf_to_torus_solution(const Trajectory& ktraj,
                                 const TorusGrid& grid2);

/// Boundary points (x, y) = S n + S_theta tangent, one per grid node.
std::vector<std::array<double, 2>> boundary_points(const ScalarField& S);

}  // namespace psce
