#include "core/source_term.hpp"

#include <algorithm>
#include <cmath>

namespace psce {

SourceTerm SourceTerm::constant(double value, bool monotone) {
  SourceTerm s;
  s.kind_ = SourceKind::constant;
  s.monotone_ = monotone;
  s.value_ = value;
  s.check_positive();
  return s;
}

SourceTerm SourceTerm::separable(ScalarField profile, bool monotone) {
  SourceTerm s;
  s.kind_ = SourceKind::separable;
  s.monotone_ = monotone;
  s.profile_ = std::move(profile);
  s.check_positive();
  return s;
}

SourceTerm SourceTerm::tabulated(
    std::vector<std::pair<double, ScalarField>> table, bool monotone) {
  require(table.size() >= 2, ErrorCode::invalid_argument,
          "tabulated source needs at least two samples");
  for (std::size_t i = 1; i < table.size(); ++i) {
    require(table[i].first > table[i - 1].first, ErrorCode::invalid_argument,
            "tabulated source times must be strictly increasing");
    require(table[i].second.grid().compatible(table[0].second.grid()),
            ErrorCode::grid_mismatch,
            "tabulated source samples must share a grid");
  }
  SourceTerm s;
  s.kind_ = SourceKind::tabulated;
  s.monotone_ = monotone;
  s.table_ = std::move(table);
  s.check_positive();
  return s;
}

void SourceTerm::check_positive() const {
  switch (kind_) {
    case SourceKind::constant:
      require(value_ > 0.0 && std::isfinite(value_),
              ErrorCode::invalid_argument, "source must be positive");
      break;
    case SourceKind::separable:
      require(profile_->all_finite() && profile_->all_positive(),
              ErrorCode::invalid_argument,
              "source profile must be positive and finite");
      break;
    case SourceKind::tabulated:
      for (const auto& [t, f] : table_)
        require(f.all_finite() && f.all_positive(),
                ErrorCode::invalid_argument,
                "tabulated source samples must be positive and finite");
      break;
  }
}

void SourceTerm::eval(double t, std::span<double> out) const {
  switch (kind_) {
    case SourceKind::constant:
      std::fill(out.begin(), out.end(), value_);
      return;
    case SourceKind::separable: {
      auto v = profile_->values();
      require(v.size() == out.size(), ErrorCode::grid_mismatch,
              "output span does not match source profile");
      std::copy(v.begin(), v.end(), out.begin());
      return;
    }
    case SourceKind::tabulated: {
      require(table_[0].second.size() == out.size(), ErrorCode::grid_mismatch,
              "output span does not match source table");
      if (t <= table_.front().first) {
        auto v = table_.front().second.values();
        std::copy(v.begin(), v.end(), out.begin());
        return;
      }
      if (t >= table_.back().first) {
        auto v = table_.back().second.values();
        std::copy(v.begin(), v.end(), out.begin());
        return;
      }
      auto it = std::upper_bound(
          table_.begin(), table_.end(), t,
          [](double tt, const auto& e) { return tt < e.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (t - lo.first) / (hi.first - lo.first);
      auto a = lo.second.values();
      auto b = hi.second.values();
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = (1.0 - w) * a[i] + w * b[i];
        out[i] = std::max(v, 1e-300);  // interpolation stays positive
      }
      return;
    }
  }
}

ScalarField SourceTerm::at(const TorusGrid& grid, double t) const {
  ScalarField f(grid);
  eval(t, f.values());
  return f;
}

double SourceTerm::scalar_value() const {
  require(kind_ == SourceKind::constant, ErrorCode::invalid_argument,
          "scalar_value applies to constant sources only");
  return value_;
}

double SourceTerm::inf(double t) const {
  switch (kind_) {
    case SourceKind::constant:
      return value_;
    case SourceKind::separable:
      return profile_->min();
    case SourceKind::tabulated: {
      std::vector<double> tmp(table_[0].second.size());
      eval(t, tmp);
      return *std::min_element(tmp.begin(), tmp.end());
    }
  }
  return value_;
}

double SourceTerm::sup(double t) const {
  switch (kind_) {
    case SourceKind::constant:
      return value_;
    case SourceKind::separable:
      return profile_->max();
    case SourceKind::tabulated: {
      std::vector<double> tmp(table_[0].second.size());
      eval(t, tmp);
      return *std::max_element(tmp.begin(), tmp.end());
    }
  }
  return value_;
}

bool SourceTerm::verify_monotone(double tol) const {
  if (kind_ != SourceKind::tabulated) return true;
  for (std::size_t i = 1; i < table_.size(); ++i) {
    auto a = table_[i - 1].second.values();
    auto b = table_[i].second.values();
    for (std::size_t j = 0; j < a.size(); ++j)
      if (b[j] < a[j] - tol) return false;
  }
  return true;
}

SourceTerm SourceTerm::with_times_scaled(double factor) const {
  require(factor > 0.0, ErrorCode::invalid_argument,
          "time scale factor must be positive");
  SourceTerm s = *this;
  for (auto& [t, f] : s.table_) t *= factor;
  return s;
}

std::size_t SourceTerm::spatial_size() const {
  switch (kind_) {
    case SourceKind::constant: return 0;
    case SourceKind::separable: return profile_->size();
    case SourceKind::tabulated: return table_[0].second.size();
  }
  return 0;
}

}  // namespace psce
