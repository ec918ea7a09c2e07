#include "durx/quadrature.hpp"

#include <array>
#include <stdexcept>

namespace durx {

namespace {

struct Gauss1d {
  std::vector<double> x;
  std::vector<double> w;
};

Gauss1d gauss_1d(int n) {
  switch (n) {
    case 1:
      return {{0.0}, {2.0}};
    case 2:
      return {{-0.5773502691896257, 0.5773502691896257}, {1.0, 1.0}};
    case 3:
      return {{-0.7745966692414834, 0.0, 0.7745966692414834},
              {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    case 4:
      return {{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
               0.8611363115940526},
              {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
               0.3478548451374538}};
    case 5:
      return {{-0.9061798459386640, -0.5384693101056831, 0.0,
               0.5384693101056831, 0.9061798459386640},
              {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
               0.4786286704993665, 0.2369268850561891}};
    case 6:
      return {{-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
               0.2386191860831969, 0.6612093864662645, 0.9324695142031521},
              {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
               0.4679139345726910, 0.3607615730481386, 0.1713244923791704}};
    default:
      throw std::invalid_argument("gauss_rule: order must be in 1..6");
  }
}

}  // namespace

GaussRule gauss_rule(int order) {
  Gauss1d g = gauss_1d(order);
  GaussRule rule;
  rule.order = order;
  rule.points.reserve(static_cast<size_t>(order) * order);
  for (int j = 0; j < order; ++j)
    for (int i = 0; i < order; ++i)
      rule.points.push_back({g.x[i], g.x[j], g.w[i] * g.w[j]});
  return rule;
}

const std::vector<TriPoint>& tri_rule_3() {
  static const std::vector<TriPoint> rule = {
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0},
  };
  return rule;
}

const std::vector<TriPoint>& tri_rule_7() {
  constexpr double a1 = 0.0597158717897698;
  constexpr double b1 = 0.4701420641051151;
  constexpr double w1 = 0.1323941527885062;
  constexpr double a2 = 0.7974269853530873;
  constexpr double b2 = 0.1012865073234563;
  constexpr double w2 = 0.1259391805448271;
  static const std::vector<TriPoint> rule = {
      {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
      {a1, b1, b1, w1},
      {b1, a1, b1, w1},
      {b1, b1, a1, w1},
      {a2, b2, b2, w2},
      {b2, a2, b2, w2},
      {b2, b2, a2, w2},
  };
  return rule;
}

}  // namespace durx
