#pragma once

#include <string>
#include <vector>

#include "durx/mesh.hpp"

namespace durx {

// Comma-separated table with a fixed header row, '.' decimal marks and
// LF line endings.  Doubles are printed with enough digits to read
// back the exact value.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);

  static std::string num(double v);
  static std::string num(int v) { return std::to_string(v); }
  static std::string num(long long v) { return std::to_string(v); }

  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void ensure_dir(const std::string& dir);

// Legacy ASCII VTK unstructured grid over the quad mesh with nodal
// displacement and Von Mises fields.  Elements flagged false in keep
// (fully voided ones) are left out of the connectivity.
void write_vtk(const std::string& path, const QuadMesh& mesh,
               const std::vector<double>& ux, const std::vector<double>& uy,
               const std::vector<double>& von_mises, const std::vector<char>& keep);

}  // namespace durx
