#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "core/frames.hpp"
#include "core/grid.hpp"

namespace psce {

/// Per-sample scalars recorded alongside each stored field.
struct SampleDiag {
  double min = 0.0;
  double max = 0.0;
};

/// Time-ordered samples of one evolution run in a fixed frame.
class Trajectory {
 public:
  explicit Trajectory(Frame frame) : frame_(frame) { frame_.validate(); }

  const Frame& frame() const { return frame_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

  const std::vector<double>& times() const { return times_; }
  const std::vector<ScalarField>& fields() const { return fields_; }
  const std::vector<SampleDiag>& diags() const { return diags_; }

  double time(std::size_t i) const { return times_.at(i); }
  const ScalarField& field(std::size_t i) const { return fields_.at(i); }
  const SampleDiag& diag(std::size_t i) const { return diags_.at(i); }

  const ScalarField& back_field() const { return fields_.back(); }
  double back_time() const { return times_.back(); }

  void push(double t, ScalarField field) {
    require(times_.empty() || t > times_.back(), ErrorCode::invalid_argument,
            "trajectory times must be strictly increasing");
    require(field.all_finite() && field.all_positive(),
            ErrorCode::positivity_loss,
            "trajectory samples must be positive and finite");
    require(fields_.empty() || field.grid().compatible(fields_[0].grid()),
            ErrorCode::grid_mismatch, "trajectory samples must share a grid");
    diags_.push_back({field.min(), field.max()});
    times_.push_back(t);
    fields_.push_back(std::move(field));
  }

  /// Drop every second stored sample, always keeping the last one.
  void decimate() {
    if (times_.size() < 3) return;
    std::vector<double> ts;
    std::vector<ScalarField> fs;
    std::vector<SampleDiag> ds;
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (i % 2 == 0 || i + 1 == times_.size()) {
        ts.push_back(times_[i]);
        fs.push_back(std::move(fields_[i]));
        ds.push_back(diags_[i]);
      }
    }
    times_ = std::move(ts);
    fields_ = std::move(fs);
    diags_ = std::move(ds);
  }

 private:
  Frame frame_;
  std::vector<double> times_;
  std::vector<ScalarField> fields_;
  std::vector<SampleDiag> diags_;
};

/// Pointwise linear interpolation of the run at time t (inside the range).
inline ScalarField sample_at(const Trajectory& traj, double t) {
  require(!traj.empty() && t >= traj.time(0) && t <= traj.back_time(),
          ErrorCode::span_too_short, "requested time outside the stored run");
  const auto& ts = traj.times();
  auto it = std::lower_bound(ts.begin(), ts.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - ts.begin());
  if (j == 0) return traj.field(0);
  const double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
  const ScalarField& a = traj.field(j - 1);
  const ScalarField& b = traj.field(j);
  ScalarField out(a.grid());
  for (std::size_t p = 0; p < out.size(); ++p)
    out[p] = (1.0 - w) * a[p] + w * b[p];
  return out;
}

/// Interpolation through y = 1/field^2, which is linear in t for fields that
/// blow up self-similarly like 1/sqrt(t1 - t); plain linear interpolation of
/// the field itself loses several digits near the singular time.
inline ScalarField sample_inverse_square_at(const Trajectory& traj, double t) {
  require(!traj.empty() && t >= traj.time(0) && t <= traj.back_time(),
          ErrorCode::span_too_short, "requested time outside the stored run");
  const auto& ts = traj.times();
  auto it = std::lower_bound(ts.begin(), ts.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - ts.begin());
  if (j == 0) return traj.field(0);
  const double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
  const ScalarField& a = traj.field(j - 1);
  const ScalarField& b = traj.field(j);
  ScalarField out(a.grid());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double y = (1.0 - w) / (a[p] * a[p]) + w / (b[p] * b[p]);
    out[p] = 1.0 / std::sqrt(y);
  }
  return out;
}

}  // namespace psce
