#include "core/frames.hpp"

#include <cmath>

namespace psce {

void Frame::validate() const {
  require(n >= 3, ErrorCode::invalid_argument, "frame requires n >= 3");
  require(r0 > 0.0, ErrorCode::invalid_argument, "frame requires r0 > 0");
  if (kind == FrameKind::tau_frame) {
    require(t1.has_value() && *t1 == 1.0, ErrorCode::invalid_argument,
            "tau frame requires the blow-up time normalized to t1 = 1");
  }
}

const char* frame_kind_name(FrameKind k) {
  switch (k) {
    case FrameKind::r_frame: return "r";
    case FrameKind::t_frame: return "t";
    case FrameKind::tau_frame: return "tau";
  }
  return "?";
}

double r_to_t(double r, int n) {
  require(n >= 3, ErrorCode::invalid_argument, "r_to_t requires n >= 3");
  require(r > 0.0, ErrorCode::invalid_argument, "r_to_t requires r > 0");
  return std::pow(r, n - 2) / ((n - 1) * (n - 2));
}

double t_to_r(double t, int n) {
  require(n >= 3, ErrorCode::invalid_argument, "t_to_r requires n >= 3");
  require(t > 0.0, ErrorCode::invalid_argument, "t_to_r requires t > 0");
  return std::pow((n - 1) * (n - 2) * t, 1.0 / (n - 2));
}

double t_to_tau(double t) {
  require(t >= 0.0 && t < 1.0, ErrorCode::invalid_argument,
          "t_to_tau requires 0 <= t < 1 (blow-up normalized to t1 = 1)");
  return -std::log1p(-t);
}

double tau_to_t(double tau) {
  require(tau >= 0.0, ErrorCode::invalid_argument,
          "tau_to_t requires tau >= 0");
  return -std::expm1(-tau);
}

namespace {
ScalarField scaled(const ScalarField& f, double factor) {
  ScalarField out(f.grid(), std::vector<double>(f.values().begin(),
                                                f.values().end()));
  for (auto& v : out.values()) v *= factor;
  return out;
}
}  // namespace

ScalarField u_to_utilde(const ScalarField& u, double r, int n) {
  require(n >= 3, ErrorCode::invalid_argument, "u_to_utilde requires n >= 3");
  require(r > 0.0, ErrorCode::invalid_argument, "u_to_utilde requires r > 0");
  require(u.all_positive(), ErrorCode::invalid_argument,
          "u_to_utilde requires u > 0 pointwise");
  return scaled(u, std::pow(r, 1.0 - n / 2.0));
}

ScalarField utilde_to_u(const ScalarField& utilde, double r, int n) {
  require(n >= 3, ErrorCode::invalid_argument, "utilde_to_u requires n >= 3");
  require(r > 0.0, ErrorCode::invalid_argument, "utilde_to_u requires r > 0");
  return scaled(utilde, std::pow(r, n / 2.0 - 1.0));
}

ScalarField utilde_to_v(const ScalarField& utilde, double t) {
  require(t >= 0.0 && t < 1.0, ErrorCode::invalid_argument,
          "utilde_to_v requires 0 <= t < 1");
  return scaled(utilde, std::sqrt(1.0 - t));
}

ScalarField v_to_utilde(const ScalarField& v, double t) {
  require(t >= 0.0 && t < 1.0, ErrorCode::invalid_argument,
          "v_to_utilde requires 0 <= t < 1");
  return scaled(v, 1.0 / std::sqrt(1.0 - t));
}

TrivialSolution::TrivialSolution(int n_, double f0_, double r0_, double u0_)
    : n(n_), f0(f0_), r0(r0_), u0(u0_) {
  require(n >= 3, ErrorCode::invalid_argument, "trivial solution needs n >= 3");
  require(f0 > 0.0 && r0 > 0.0 && u0 > 0.0, ErrorCode::invalid_argument,
          "trivial solution needs f0, r0, u0 > 0");
  const double r0p = std::pow(r0, n - 2);
  const double r1p = (n - 1) * (n - 2) / (2.0 * f0) * r0p / (u0 * u0) + r0p;
  r1_ = std::pow(r1p, 1.0 / (n - 2));
  c0_ = 2.0 * f0 / ((n - 1) * (n - 2));
}

double TrivialSolution::t1() const { return r_to_t(r1_, n); }

double TrivialSolution::u(double r) const {
  require(r >= r0 && r < r1_, ErrorCode::invalid_argument,
          "trivial solution defined for r in [r0, r1)");
  return 1.0 / std::sqrt(c0_ * (std::pow(r1_ / r, n - 2) - 1.0));
}

double TrivialSolution::utilde(double t) const {
  const double r = t_to_r(t, n);
  return std::pow(r, 1.0 - n / 2.0) * u(r);
}

}  // namespace psce
