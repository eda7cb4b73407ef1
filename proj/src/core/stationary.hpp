#pragma once

#include <optional>
#include <vector>

#include "core/source_term.hpp"

namespace psce {

struct StationaryOptions {
  double tol = 1e-10;          // max-norm residual target
  int max_iters = 100;         // Newton iterations
  double positivity_floor = 1e-6;
  int gmres_restart = 60;
  int gmres_max_iters = 400;
  double gmres_tol = 1e-3;     // relative; Newton tolerates inexact steps
};

struct StationaryState {
  ScalarField omega;
  double residual_norm = 0.0;
  ScalarField f_used;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Stationary-equation residual F(v) = Lap v + f v - 1/(2v).
ScalarField stationary_residual(const ScalarField& v, const ScalarField& f);

/// Damped Newton iteration for Lap v + f v = 1/(2v), v > 0. The linearized
/// operator Lap + f + 1/(2 v^2) is solved by GMRES with a constant-coefficient
/// spectral preconditioner. Default initial guess: the constant 1/sqrt(2 fbar).
StationaryState solve_stationary(const TorusGrid& grid, const ScalarField& f,
                                 const std::optional<ScalarField>& guess = {},
                                 const StationaryOptions& opts = {});

}  // namespace psce
