#include "durx/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace durx {

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CsvTable: row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << str();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

void write_vtk(const std::string& path, const QuadMesh& mesh,
               const std::vector<double>& ux, const std::vector<double>& uy,
               const std::vector<double>& von_mises, const std::vector<char>& keep) {
  const std::size_t nn = static_cast<std::size_t>(mesh.node_count());
  if (ux.size() != nn || uy.size() != nn || von_mises.size() != nn ||
      keep.size() != static_cast<std::size_t>(mesh.elem_count()))
    throw std::invalid_argument("write_vtk: field size does not match the mesh");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);

  char buf[128];
  f << "# vtk DataFile Version 3.0\n";
  f << "crack propagation step\n";
  f << "ASCII\n";
  f << "DATASET UNSTRUCTURED_GRID\n";
  f << "POINTS " << nn << " double\n";
  for (std::size_t i = 0; i < nn; ++i) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g 0\n", mesh.nodes[i][0], mesh.nodes[i][1]);
    f << buf;
  }
  int ne = 0;
  for (char k : keep) ne += k ? 1 : 0;
  f << "CELLS " << ne << " " << 5 * ne << "\n";
  for (int e = 0; e < mesh.elem_count(); ++e) {
    if (!keep[static_cast<std::size_t>(e)]) continue;
    const auto& c = mesh.elems[static_cast<std::size_t>(e)];
    f << "4 " << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << "\n";
  }
  f << "CELL_TYPES " << ne << "\n";
  for (int e = 0; e < ne; ++e) f << "9\n";

  f << "POINT_DATA " << nn << "\n";
  f << "VECTORS displacement double\n";
  for (std::size_t i = 0; i < nn; ++i) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g 0\n", ux[i], uy[i]);
    f << buf;
  }
  auto scalars = [&](const char* name, auto value) {
    f << "SCALARS " << name << " double 1\n";
    f << "LOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < nn; ++i) {
      std::snprintf(buf, sizeof buf, "%.9g\n", value(i));
      f << buf;
    }
  };
  scalars("displacement_magnitude",
          [&](std::size_t i) { return std::hypot(ux[i], uy[i]); });
  scalars("von_mises", [&](std::size_t i) { return von_mises[i]; });
}

}  // namespace durx
