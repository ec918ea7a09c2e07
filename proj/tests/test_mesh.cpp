#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "durx/mesh.hpp"

using namespace durx;

TEST_CASE("mesh counts and spacing") {
  QuadMesh m1 = build_mesh(1.0, 1.0, 1, 1);
  CHECK(m1.node_count() == 4);
  CHECK(m1.elem_count() == 1);

  QuadMesh m2 = build_mesh(1.0, 1.0, 2, 2);
  CHECK(m2.node_count() == 9);
  CHECK(m2.elem_count() == 4);

  QuadMesh plate = build_mesh(60.0, 120.0, 30, 60);
  CHECK(plate.node_count() == 1891);
  CHECK(plate.dx == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(plate.dy == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mesh rejects degenerate input") {
  CHECK_THROWS_AS(build_mesh(0.0, 1.0, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(1.0, -1.0, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(1.0, 1.0, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(1.0, 1.0, 2, 0), std::invalid_argument);
}

TEST_CASE("element connectivity is counterclockwise") {
  QuadMesh m = build_mesh(6.0, 4.0, 3, 2);
  for (int e = 0; e < m.elem_count(); ++e) {
    auto c = m.elem_coords(e);
    double area2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      auto& a = c[static_cast<std::size_t>(k)];
      auto& b = c[static_cast<std::size_t>((k + 1) % 4)];
      area2 += a[0] * b[1] - b[0] * a[1];
    }
    CHECK(area2 == doctest::Approx(2.0 * m.dx * m.dy).epsilon(1e-13));
  }
}

TEST_CASE("shape function point values") {
  ShapeEval c = shape_functions(0.0, 0.0);
  for (int i = 0; i < 4; ++i) CHECK(c.n[static_cast<std::size_t>(i)] == doctest::Approx(0.25));

  ShapeEval corner = shape_functions(-1.0, -1.0);
  CHECK(corner.n[0] == doctest::Approx(1.0));
  CHECK(corner.n[1] == doctest::Approx(0.0));
  CHECK(corner.n[2] == doctest::Approx(0.0));
  CHECK(corner.n[3] == doctest::Approx(0.0));

  ShapeEval s = shape_functions(0.5, -0.5);
  CHECK(s.n[0] == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(s.n[1] == doctest::Approx(0.5625).epsilon(1e-14));
  CHECK(s.n[2] == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(s.n[3] == doctest::Approx(0.0625).epsilon(1e-14));
}

TEST_CASE("partition of unity over random reference points") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    ShapeEval s = shape_functions(u(rng), u(rng));
    double sum = 0.0, sx = 0.0, sy = 0.0;
    for (int i = 0; i < 4; ++i) {
      sum += s.n[static_cast<std::size_t>(i)];
      sx += s.dxi[static_cast<std::size_t>(i)];
      sy += s.deta[static_cast<std::size_t>(i)];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-14);
    CHECK(std::abs(sx) <= 1e-13);
    CHECK(std::abs(sy) <= 1e-13);
  }
}

TEST_CASE("locate and coordinate maps round-trip") {
  QuadMesh m = build_mesh(7.0, 5.0, 7, 10);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(0.01, 6.99), uy(0.01, 4.99);
  for (int k = 0; k < 200; ++k) {
    double x = ux(rng), y = uy(rng);
    int e = m.locate(x, y);
    REQUIRE(e >= 0);
    auto ref = m.to_reference(e, x, y);
    CHECK(ref[0] >= -1.0 - 1e-12);
    CHECK(ref[0] <= 1.0 + 1e-12);
    CHECK(ref[1] >= -1.0 - 1e-12);
    CHECK(ref[1] <= 1.0 + 1e-12);
    auto back = m.to_physical(e, ref[0], ref[1]);
    CHECK(back[0] == doctest::Approx(x).epsilon(1e-12));
    CHECK(back[1] == doctest::Approx(y).epsilon(1e-12));
  }
  CHECK(m.locate(-0.1, 2.0) == -1);
  CHECK(m.locate(7.1, 2.0) == -1);
  CHECK(m.locate(3.0, 5.2) == -1);
  CHECK(m.char_length() > 0.0);
}
