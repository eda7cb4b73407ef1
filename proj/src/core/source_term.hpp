#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "core/grid.hpp"

namespace psce {

enum class SourceKind { constant, separable, tabulated };

/// The prescribed source f of the evolution equations. Strictly positive by
/// contract; tabulated sources are interpolated linearly in time with values
/// clamped positive.
class SourceTerm {
 public:
  static SourceTerm constant(double value, bool monotone = true);
  static SourceTerm separable(ScalarField profile, bool monotone = true);
  static SourceTerm tabulated(std::vector<std::pair<double, ScalarField>> table,
                              bool monotone);

  SourceKind kind() const { return kind_; }
  bool monotone_flag() const { return monotone_; }
  bool constant_in_time() const { return kind_ != SourceKind::tabulated; }

  void set_limit(ScalarField f_t1) { limit_ = std::move(f_t1); }
  const std::optional<ScalarField>& limit() const { return limit_; }

  /// f at time t, written pointwise into `out` (grid-sized).
  void eval(double t, std::span<double> out) const;

  /// Convenience: f(t) as a field on `grid`.
  ScalarField at(const TorusGrid& grid, double t) const;

  double scalar_value() const;  // constant kind only
  double inf(double t) const;
  double sup(double t) const;

  /// For tabulated monotone-flagged sources, verify f(t2) >= f(t1) - tol
  /// pointwise on the stored table.
  bool verify_monotone(double tol = 1e-12) const;

  /// Rescale tabulated sample times by `factor` (blow-up normalization).
  SourceTerm with_times_scaled(double factor) const;

  std::size_t spatial_size() const;  // 0 for constant

 private:
  SourceTerm() = default;
  void check_positive() const;

  SourceKind kind_ = SourceKind::constant;
  bool monotone_ = true;
  double value_ = 0.0;
  std::optional<ScalarField> profile_;
  std::vector<std::pair<double, ScalarField>> table_;
  std::optional<ScalarField> limit_;
};

}  // namespace psce
