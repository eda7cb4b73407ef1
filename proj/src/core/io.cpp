#include "core/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace psce {

namespace {
constexpr char kBinMagic[8] = {'P', 'S', 'C', 'E', 'F', '1', 0, 0};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  const TorusGrid& g = field.grid();
  if (path.extension() == ".bin") {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::io, "cannot open " + path.string());
    out.write(kBinMagic, sizeof(kBinMagic));
    const int32_t dim = g.dim(), pts = g.points_per_axis();
    const double period = g.period();
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    out.write(reinterpret_cast<const char*>(&pts), sizeof(pts));
    out.write(reinterpret_cast<const char*>(&period), sizeof(period));
    out.write(reinterpret_cast<const char*>(field.values().data()),
              static_cast<std::streamsize>(field.size() * sizeof(double)));
    require(out.good(), ErrorCode::io, "write failed: " + path.string());
    return;
  }
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot open " + path.string());
  out << g.dim() << ',' << g.points_per_axis() << ','
      << format_double(g.period()) << '\n';
  for (double v : field.values()) out << format_double(v) << '\n';
  require(out.good(), ErrorCode::io, "write failed: " + path.string());
}

FieldData read_field(const std::filesystem::path& path) {
  FieldData d;
  require(std::filesystem::exists(path), ErrorCode::missing_artifacts,
          "no such field file: " + path.string());
  if (path.extension() == ".bin") {
    std::ifstream in(path, std::ios::binary);
    char magic[8];
    in.read(magic, sizeof(magic));
    require(in.good() && std::memcmp(magic, kBinMagic, sizeof(magic)) == 0,
            ErrorCode::io, "bad field file magic: " + path.string());
    int32_t dim = 0, pts = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    in.read(reinterpret_cast<char*>(&pts), sizeof(pts));
    in.read(reinterpret_cast<char*>(&d.period), sizeof(d.period));
    d.dim = dim;
    d.points_per_axis = pts;
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(pts);
    d.values.resize(n);
    in.read(reinterpret_cast<char*>(d.values.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    require(in.good(), ErrorCode::io, "truncated field file: " + path.string());
    return d;
  }
  std::ifstream in(path);
  char comma = 0;
  in >> d.dim >> comma >> d.points_per_axis >> comma >> d.period;
  require(in.good() && d.dim >= 1 && d.points_per_axis >= 8, ErrorCode::io,
          "bad field header: " + path.string());
  std::size_t n = 1;
  for (int a = 0; a < d.dim; ++a) n *= static_cast<std::size_t>(d.points_per_axis);
  d.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) in >> d.values[i];
  require(in.good(), ErrorCode::io, "truncated field file: " + path.string());
  return d;
}

ScalarField attach(const TorusGrid& grid, const FieldData& data) {
  require(grid.dim() == data.dim &&
              grid.points_per_axis() == data.points_per_axis &&
              grid.period() == data.period,
          ErrorCode::grid_mismatch, "snapshot does not match grid");
  return ScalarField(grid, data.values);
}

}  // namespace psce
