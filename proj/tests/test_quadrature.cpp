#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "durx/quadrature.hpp"

using namespace durx;

namespace {

// Exact integral of x^a y^b over the unit reference triangle
// {x >= 0, y >= 0, x + y <= 1}: a! b! / (a + b + 2)!.
double tri_monomial(int a, int b) {
  auto fact = [](int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  return fact(a) * fact(b) / fact(a + b + 2);
}

double tri_quad(const std::vector<TriPoint>& rule, int a, int b) {
  // Map barycentric (l1,l2,l3) onto the unit triangle with vertices
  // (0,0), (1,0), (0,1); weights are area-normalized so scale by 1/2.
  double s = 0.0;
  for (const auto& p : rule) {
    double x = p.l2;
    double y = p.l3;
    s += p.weight * std::pow(x, a) * std::pow(y, b);
  }
  return 0.5 * s;
}

}  // namespace

TEST_CASE("gauss rules integrate monomials to machine precision") {
  for (int order = 1; order <= 6; ++order) {
    GaussRule rule = gauss_rule(order);
    CHECK(rule.points.size() == static_cast<std::size_t>(order * order));

    double total = 0.0;
    for (const auto& p : rule.points) total += p.weight;
    CHECK(total == doctest::Approx(4.0).epsilon(1e-14));

    // Tensor rules are exact through degree 2*order-1 per direction.
    for (int p = 0; p <= 2 * order - 1; ++p) {
      double got = 0.0;
      for (const auto& q : rule.points) got += q.weight * std::pow(q.xi, p) * 1.0;
      double want = (p % 2 == 0) ? 2.0 / (p + 1) * 2.0 : 0.0;
      CHECK(std::abs(got - want) <= 1e-13);

      double got_eta = 0.0;
      for (const auto& q : rule.points) got_eta += q.weight * std::pow(q.eta, p);
      CHECK(std::abs(got_eta - want) <= 1e-13);
    }
  }
}

TEST_CASE("gauss rule rejects unsupported orders") {
  CHECK_THROWS_AS(gauss_rule(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_rule(7), std::invalid_argument);
  CHECK_THROWS_AS(gauss_rule(-2), std::invalid_argument);
}

TEST_CASE("triangle rules are interior and normalized") {
  for (const auto* rule : {&tri_rule_3(), &tri_rule_7()}) {
    double total = 0.0;
    for (const auto& p : *rule) {
      total += p.weight;
      CHECK(p.l1 > 0.0);
      CHECK(p.l2 > 0.0);
      CHECK(p.l3 > 0.0);
      CHECK(p.l1 + p.l2 + p.l3 == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("triangle rule polynomial exactness") {
  // 3-point rule: exact through total degree 2.
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; a + b <= 2; ++b)
      CHECK(tri_quad(tri_rule_3(), a, b) == doctest::Approx(tri_monomial(a, b)).epsilon(1e-13));

  // 7-point rule: exact through total degree 5.
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b)
      CHECK(tri_quad(tri_rule_7(), a, b) == doctest::Approx(tri_monomial(a, b)).epsilon(1e-12));
}
