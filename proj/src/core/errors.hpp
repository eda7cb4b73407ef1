#pragma once

#include <stdexcept>
#include <string>

namespace psce {

enum class ErrorCode {
  invalid_argument,
  grid_mismatch,
  blowup_detected,
  step_underflow,
  no_convergence,
  positivity_loss,
  fit_rejected,
  monotonicity_violation,
  convexity_lost,
  divergent_tail,
  span_too_short,
  tail_not_converged,
  missing_artifacts,
  config,
  io,
  internal,
};

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace psce
