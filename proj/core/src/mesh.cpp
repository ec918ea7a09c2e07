#include "durx/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace durx {

QuadMesh build_mesh(double width, double height, int nx, int ny) {
  if (width <= 0.0 || height <= 0.0)
    throw std::invalid_argument("build_mesh: domain must have positive size");
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("build_mesh: need at least one element per direction");

  QuadMesh m;
  m.nx = nx;
  m.ny = ny;
  m.width = width;
  m.height = height;
  m.dx = width / nx;
  m.dy = height / ny;

  m.nodes.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes.push_back({i * m.dx, j * m.dy});

  m.elems.reserve(static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.elems.push_back({m.node_id(i, j), m.node_id(i + 1, j),
                         m.node_id(i + 1, j + 1), m.node_id(i, j + 1)});
  return m;
}

std::array<std::array<double, 2>, 4> QuadMesh::elem_coords(int e) const {
  const auto& c = elems[static_cast<size_t>(e)];
  return {nodes[static_cast<size_t>(c[0])], nodes[static_cast<size_t>(c[1])],
          nodes[static_cast<size_t>(c[2])], nodes[static_cast<size_t>(c[3])]};
}

int QuadMesh::locate(double x, double y) const {
  constexpr double tol = 1e-12;
  if (x < -tol * width || x > width * (1.0 + tol)) return -1;
  if (y < -tol * height || y > height * (1.0 + tol)) return -1;
  int i = std::clamp(static_cast<int>(std::floor(x / dx)), 0, nx - 1);
  int j = std::clamp(static_cast<int>(std::floor(y / dy)), 0, ny - 1);
  return elem_id(i, j);
}

std::array<double, 2> QuadMesh::to_reference(int e, double x, double y) const {
  auto c = elem_coords(e);
  double xc = 0.5 * (c[0][0] + c[1][0]);
  double yc = 0.5 * (c[0][1] + c[3][1]);
  return {2.0 * (x - xc) / dx, 2.0 * (y - yc) / dy};
}

std::array<double, 2> QuadMesh::to_physical(int e, double xi, double eta) const {
  auto c = elem_coords(e);
  double xc = 0.5 * (c[0][0] + c[1][0]);
  double yc = 0.5 * (c[0][1] + c[3][1]);
  return {xc + 0.5 * dx * xi, yc + 0.5 * dy * eta};
}

double QuadMesh::char_length() const { return std::sqrt(dx * dy); }

ShapeEval shape_functions(double xi, double eta) {
  ShapeEval s;
  const double xm = 1.0 - xi, xp = 1.0 + xi;
  const double em = 1.0 - eta, ep = 1.0 + eta;
  s.n = {0.25 * xm * em, 0.25 * xp * em, 0.25 * xp * ep, 0.25 * xm * ep};
  s.dxi = {-0.25 * em, 0.25 * em, 0.25 * ep, -0.25 * ep};
  s.deta = {-0.25 * xm, -0.25 * xp, 0.25 * xp, 0.25 * xm};
  return s;
}

}  // namespace durx
