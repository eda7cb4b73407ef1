#include "core/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace psce {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct TorusGrid::Fft {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

double TorusGrid::default_period() { return 2.0 * std::numbers::pi; }

TorusGrid::TorusGrid(int dim, int points_per_axis, double period)
    : dim_(dim), points_(points_per_axis), period_(period) {
  require(dim >= 1, ErrorCode::invalid_argument, "grid dim must be >= 1");
  require(points_per_axis >= 8 && points_per_axis % 2 == 0,
          ErrorCode::invalid_argument, "points_per_axis must be even and >= 8");
  require(period > 0.0, ErrorCode::invalid_argument, "period must be positive");

  size_ = 1;
  for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(points_);
  const double h = period_ / points_;
  weight_ = std::pow(h, dim_);

  coords_.resize(points_);
  for (int i = 0; i < points_; ++i) coords_[i] = i * h;

  const double dk = 2.0 * std::numbers::pi / period_;
  k_axis_.resize(points_);
  kd_axis_.resize(points_);
  for (int m = 0; m < points_; ++m) {
    const int mm = (m <= points_ / 2) ? m : m - points_;
    k_axis_[m] = mm * dk;
    kd_axis_[m] = (m == points_ / 2) ? 0.0 : mm * dk;
  }

  k2_.assign(size_, 0.0);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    std::size_t rest = flat;
    double s = 0.0;
    for (int a = dim_ - 1; a >= 0; --a) {
      const int m = static_cast<int>(rest % points_);
      rest /= points_;
      s += k_axis_[m] * k_axis_[m];
    }
    k2_[flat] = s;
  }

  fft_ = std::make_unique<Fft>();
  std::vector<int> n(dim_, points_);
  std::vector<std::complex<double>> buf(size_);
  auto* b = reinterpret_cast<fftw_complex*>(buf.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  fft_->fwd = fftw_plan_dft(dim_, n.data(), b, b, FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  fft_->bwd = fftw_plan_dft(dim_, n.data(), b, b, FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  require(fft_->fwd && fft_->bwd, ErrorCode::internal, "fftw plan failed");
}

TorusGrid::~TorusGrid() = default;

bool TorusGrid::compatible(const TorusGrid& other) const {
  return dim_ == other.dim_ && points_ == other.points_ &&
         period_ == other.period_;
}

std::vector<int> TorusGrid::unflatten(std::size_t flat) const {
  std::vector<int> idx(dim_);
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % points_);
    flat /= points_;
  }
  return idx;
}

void TorusGrid::check_field(const ScalarField& f) const {
  require(f.grid().compatible(*this), ErrorCode::grid_mismatch,
          "field lives on an incompatible grid");
}

void TorusGrid::forward(const double* in, std::complex<double>* out) const {
  for (std::size_t i = 0; i < size_; ++i) out[i] = in[i];
  auto* b = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(fft_->fwd, b, b);
}

void TorusGrid::backward(std::complex<double>* in, double* out) const {
  auto* b = reinterpret_cast<fftw_complex*>(in);
  fftw_execute_dft(fft_->bwd, b, b);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = in[i].real() * scale;
}

namespace {
thread_local std::vector<std::complex<double>> scratch_buf;

std::complex<double>* scratch(std::size_t n) {
  if (scratch_buf.size() < n) scratch_buf.resize(n);
  return scratch_buf.data();
}
}  // namespace

void TorusGrid::laplacian_inplace(const double* in, double* out) const {
  auto* s = scratch(size_);
  forward(in, s);
  for (std::size_t i = 0; i < size_; ++i) s[i] *= -k2_[i];
  backward(s, out);
}

ScalarField TorusGrid::laplacian(const ScalarField& f) const {
  check_field(f);
  ScalarField out(*this);
  laplacian_inplace(f.values().data(), out.values().data());
  require(out.all_finite(), ErrorCode::invalid_argument,
          "laplacian produced non-finite values");
  return out;
}

ScalarField TorusGrid::gradient(const ScalarField& f, int axis) const {
  check_field(f);
  require(axis >= 0 && axis < dim_, ErrorCode::invalid_argument,
          "gradient axis out of range");
  auto* s = scratch(size_);
  forward(f.values().data(), s);
  // stride of `axis` in the row-major layout
  std::size_t stride = 1;
  for (int a = dim_ - 1; a > axis; --a) stride *= points_;
  for (std::size_t i = 0; i < size_; ++i) {
    const int m = static_cast<int>((i / stride) % points_);
    s[i] *= std::complex<double>(0.0, kd_axis_[m]);
  }
  ScalarField out(*this);
  backward(s, out.values().data());
  return out;
}

ScalarField TorusGrid::grad_sq(const ScalarField& f) const {
  check_field(f);
  ScalarField acc(*this);
  for (int a = 0; a < dim_; ++a) {
    ScalarField g = gradient(f, a);
    for (std::size_t i = 0; i < size_; ++i) acc[i] += g[i] * g[i];
  }
  return acc;
}

double TorusGrid::integrate(const ScalarField& f) const {
  check_field(f);
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * weight_;
}

double TorusGrid::mean(const ScalarField& f) const {
  return integrate(f) / volume();
}

double TorusGrid::inner(const ScalarField& a, const ScalarField& b) const {
  check_field(a);
  check_field(b);
  double s = 0.0;
  for (std::size_t i = 0; i < size_; ++i) s += a[i] * b[i];
  return s * weight_;
}

ScalarField TorusGrid::greens_solve(const ScalarField& rho) const {
  check_field(rho);
  auto* s = scratch(size_);
  forward(rho.values().data(), s);
  s[0] = 0.0;  // subtract the mean, fix the mean-zero gauge
  for (std::size_t i = 1; i < size_; ++i) s[i] /= -k2_[i];
  ScalarField out(*this);
  backward(s, out.values().data());
  require(out.all_finite(), ErrorCode::invalid_argument,
          "greens_solve produced non-finite values");
  return out;
}

ScalarField TorusGrid::helmholtz_solve(const ScalarField& rhs, double shift,
                                       double floor) const {
  check_field(rhs);
  auto* s = scratch(size_);
  forward(rhs.values().data(), s);
  for (std::size_t i = 0; i < size_; ++i) {
    double d = -k2_[i] + shift;
    if (std::abs(d) < floor) d = (d < 0.0 ? -floor : floor);
    s[i] /= d;
  }
  ScalarField out(*this);
  backward(s, out.values().data());
  require(out.all_finite(), ErrorCode::invalid_argument,
          "helmholtz_solve produced non-finite values");
  return out;
}

ScalarField::ScalarField(const TorusGrid& grid)
    : grid_(&grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values)
    : grid_(&grid), values_(std::move(values)) {
  require(values_.size() == grid.size(), ErrorCode::invalid_argument,
          "field value count does not match grid size");
}

double ScalarField::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

bool ScalarField::all_positive() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v > 0.0; });
}

}  // namespace psce
