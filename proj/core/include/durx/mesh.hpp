#pragma once

#include <array>
#include <vector>

namespace durx {

// Structured bilinear-quad mesh on [0,width] x [0,height].
// Nodes are numbered row-major from the bottom-left corner; elements
// likewise.  Element connectivity is counterclockwise starting at the
// bottom-left node, which keeps every Jacobian positive.
struct QuadMesh {
  int nx = 0;  // element columns
  int ny = 0;  // element rows
  double width = 0.0;
  double height = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 4>> elems;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int elem_count() const { return static_cast<int>(elems.size()); }

  int node_id(int i, int j) const { return j * (nx + 1) + i; }
  int elem_id(int i, int j) const { return j * nx + i; }

  std::array<std::array<double, 2>, 4> elem_coords(int e) const;

  // Element whose closed cell contains (x, y); points on shared edges
  // resolve to the lower-index cell.  Returns -1 outside the domain.
  int locate(double x, double y) const;

  // Reference coordinates of a physical point inside element e.  The
  // map is affine because every cell is an axis-aligned rectangle.
  std::array<double, 2> to_reference(int e, double x, double y) const;
  std::array<double, 2> to_physical(int e, double xi, double eta) const;

  // Characteristic element size used for crack increments and the
  // interaction-integral radius.
  double char_length() const;
};

QuadMesh build_mesh(double width, double height, int nx, int ny);

struct ShapeEval {
  std::array<double, 4> n;
  std::array<double, 4> dxi;
  std::array<double, 4> deta;
};

ShapeEval shape_functions(double xi, double eta);

}  // namespace durx
