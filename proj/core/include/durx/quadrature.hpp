#pragma once

#include <vector>

namespace durx {

/// One quadrature point on the reference square [-1,1]^2.
struct QuadPoint {
  double xi;
  double eta;
  double weight;  // reference-square weight, all weights of a rule sum to 4
};

/// Tensor-product Gauss-Legendre rule on the reference square.
/// order is the number of points per direction (1..6).
struct GaussRule {
  int order = 2;
  std::vector<QuadPoint> points;
};

GaussRule gauss_rule(int order);

/// Symmetric interior rules on the reference triangle (barycentric form).
/// Points are strictly interior so integrands with edge discontinuities or
/// an edge singularity are never sampled on the feature itself.
struct TriPoint {
  double l1, l2, l3;  // barycentric coordinates
  double weight;      // normalized: weights sum to 1 (multiply by area)
};

/// 3-point degree-2 rule, points at (2/3,1/6,1/6) permutations.
const std::vector<TriPoint>& tri_rule_3();

/// 7-point degree-5 rule (centroid + two interior orbits).
const std::vector<TriPoint>& tri_rule_7();

}  // namespace durx
