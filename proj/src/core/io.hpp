#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/grid.hpp"

namespace psce {

/// Grid parameters + raw values of a deserialized field; the caller decides
/// which TorusGrid instance to attach them to.
struct FieldData {
  int dim = 0;
  int points_per_axis = 0;
  double period = 0.0;
  std::vector<double> values;
};

/// Snapshot layout: one-line header `dim,points_per_axis,period`, then one
/// value per line, row-major over the axes. `.bin` files use the same header
/// fields in binary with a magic tag.
void write_field(const std::filesystem::path& path, const ScalarField& field);
FieldData read_field(const std::filesystem::path& path);

ScalarField attach(const TorusGrid& grid, const FieldData& data);

std::string format_double(double v);

}  // namespace psce
