#pragma once

#include <optional>

#include "core/grid.hpp"

namespace psce {

/// Which (time variable, dependent variable) pair a solution is expressed in:
/// (r, u), (t, u-tilde), or (tau, v).
enum class FrameKind { r_frame, t_frame, tau_frame };

struct Frame {
  FrameKind kind = FrameKind::t_frame;
  int n = 3;          // ambient dimension, >= 3
  double r0 = 1.0;
  std::optional<double> t1;  // blow-up time; tau frame requires t1 == 1

  void validate() const;
};

const char* frame_kind_name(FrameKind k);

// Changes of time variable.
double r_to_t(double r, int n);
double t_to_r(double t, int n);
double t_to_tau(double t);
double tau_to_t(double tau);

// Changes of dependent variable (pointwise, order-preserving).
ScalarField u_to_utilde(const ScalarField& u, double r, int n);
ScalarField utilde_to_u(const ScalarField& utilde, double r, int n);
ScalarField utilde_to_v(const ScalarField& utilde, double t);
ScalarField v_to_utilde(const ScalarField& v, double t);

/// Closed-form constant-on-sigma blow-up solution of the fixed-metric
/// equation with constant source f0: u(r) = 1/sqrt(c0((r1/r)^{n-2}-1)).
struct TrivialSolution {
  int n = 3;
  double f0 = 0.5;
  double r0 = 1.0;
  double u0 = 1.0;

  TrivialSolution() : TrivialSolution(3, 0.5, 1.0, 1.0) {}
  TrivialSolution(int n_, double f0_, double r0_, double u0_);

  double r1() const { return r1_; }
  double c0() const { return c0_; }
  double t1() const;             // blow-up time in the t variable
  double u(double r) const;      // r in [r0, r1)
  double utilde(double t) const; // via the frame maps, t in [t0, t1)

 private:
  double r1_ = 0.0;
  double c0_ = 0.0;
};

}  // namespace psce
