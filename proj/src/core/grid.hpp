#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "core/errors.hpp"

namespace psce {

class TorusGrid;

/// Real values on a TorusGrid, stored row-major over the axes.
/// The grid must outlive every field that references it.
class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& grid);
  ScalarField(const TorusGrid& grid, std::vector<double> values);

  const TorusGrid& grid() const { return *grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double min() const;
  double max() const;
  double max_abs() const;
  bool all_finite() const;
  bool all_positive() const;

 private:
  const TorusGrid* grid_;
  std::vector<double> values_;
};

/// Periodic uniform grid on the flat (n-1)-torus with the product metric.
/// Carries the spectral Laplacian, quadrature, and the Green's operator.
/// Immutable after construction and shareable across threads.
class TorusGrid {
 public:
  TorusGrid(int dim, int points_per_axis, double period = default_period());
  ~TorusGrid();
  TorusGrid(const TorusGrid&) = delete;
  TorusGrid& operator=(const TorusGrid&) = delete;

  static double default_period();

  int dim() const { return dim_; }
  int points_per_axis() const { return points_; }
  double period() const { return period_; }
  std::size_t size() const { return size_; }
  double cell_weight() const { return weight_; }
  double volume() const { return weight_ * static_cast<double>(size_); }

  /// Equal discretization parameters; fields from compatible grids mix freely.
  bool compatible(const TorusGrid& other) const;

  /// Coordinates of the sample points along one axis (all axes are equal).
  const std::vector<double>& axis_coordinates() const { return coords_; }

  /// Multi-index (i_0,...,i_{dim-1}) of a flat row-major index.
  std::vector<int> unflatten(std::size_t flat) const;

  ScalarField laplacian(const ScalarField& f) const;
  ScalarField gradient(const ScalarField& f, int axis) const;
  double integrate(const ScalarField& f) const;
  double mean(const ScalarField& f) const;
  double inner(const ScalarField& a, const ScalarField& b) const;

  /// Mean-zero phi with Delta phi = rho - mean(rho).
  ScalarField greens_solve(const ScalarField& rho) const;

  /// Spectral solve of (Delta + shift) x = rhs; denominators are floored in
  /// magnitude so near-resonant modes pass through damped (preconditioning).
  ScalarField helmholtz_solve(const ScalarField& rhs, double shift,
                              double floor = 1e-8) const;

  /// |grad f|^2 pointwise (sum of squared spectral derivatives).
  ScalarField grad_sq(const ScalarField& f) const;

  /// Hot-loop Laplacian on raw storage; `in` and `out` have size() entries
  /// and may not alias.
  void laplacian_inplace(const double* in, double* out) const;

  void check_field(const ScalarField& f) const;

 private:
  struct Fft;

  void forward(const double* in, std::complex<double>* out) const;
  void backward(std::complex<double>* in, double* out) const;

  int dim_;
  int points_;
  double period_;
  std::size_t size_;
  double weight_;
  std::vector<double> coords_;
  std::vector<double> k2_;        // |k|^2 per flat spectral index
  std::vector<double> k_axis_;    // wavenumber per 1-d mode index (Nyquist kept)
  std::vector<double> kd_axis_;   // derivative wavenumber (Nyquist zeroed)
  std::unique_ptr<Fft> fft_;
};

}  // namespace psce
