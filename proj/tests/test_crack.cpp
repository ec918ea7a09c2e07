#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "durx/crack.hpp"
#include "durx/fracture.hpp"
#include "durx/mesh.hpp"

using namespace durx;

namespace {

CrackPath edge_crack(Vec2 mouth, Vec2 tip) {
  CrackPath c;
  c.pts = {mouth, tip};
  return c;
}

}  // namespace

TEST_CASE("signed_side distinguishes the two faces") {
  CrackPath c = edge_crack({0.0, 0.55}, {3.45, 0.55});
  CHECK(signed_side(c, {1.0, 0.9}) == 1.0);
  CHECK(signed_side(c, {1.0, 0.1}) == -1.0);
  CHECK(signed_side(c, {3.0, 0.56}) == 1.0);
  CHECK(signed_side(c, {3.0, 0.54}) == -1.0);
  CHECK_THROWS_AS(signed_side(c, {1.0, 0.55}), std::domain_error);
}

TEST_CASE("signed_side at a kink follows the farther segment") {
  CrackPath c;
  c.pts = {{0.0, 0.0}, {2.0, 0.0}, {3.0, 1.0}};
  // Above the first segment but well left of the kink: first segment rules.
  CHECK(signed_side(c, {1.0, 0.3}) == 1.0);
  CHECK(signed_side(c, {1.0, -0.3}) == -1.0);
  // In the wedge past the kink the second segment decides.
  CHECK(signed_side(c, {2.2, 0.5}) == 1.0);
  CHECK(signed_side(c, {2.8, 0.2}) == -1.0);
}

TEST_CASE("classification of a straight edge crack") {
  QuadMesh m = build_mesh(6.0, 1.0, 6, 1);
  CrackPath c = edge_crack({0.0, 0.55}, {3.45, 0.55});

  Classification cls = classify_elements(m, c);
  REQUIRE(cls.elems.size() == 6);
  CHECK(cls.split_elems == std::vector<int>{0, 1, 2});
  CHECK(cls.tip_elems == std::vector<int>{3});
  CHECK(cls.elems[0].cls == ElemClass::split);
  CHECK(cls.elems[3].cls == ElemClass::tip);
  CHECK(cls.elems[3].tip == 0);
  CHECK(cls.elems[4].cls == ElemClass::standard);
  CHECK(cls.elems[5].cls == ElemClass::standard);

  // The stored chain of a tip element ends at the physical tip.
  REQUIRE(cls.elems[3].chain.size() >= 2);
  CHECK(cls.elems[3].chain.back()[0] == doctest::Approx(3.45).epsilon(1e-12));
  CHECK(cls.elems[3].chain.back()[1] == doctest::Approx(0.55).epsilon(1e-12));

  c.extend(1, {4.45, 0.55});
  Classification cls2 = classify_elements(m, c);
  CHECK(cls2.split_elems == std::vector<int>{0, 1, 2, 3});
  CHECK(cls2.tip_elems == std::vector<int>{4});
  CHECK(cls2.elems[5].cls == ElemClass::standard);
}

TEST_CASE("classification rejects a node on the crack") {
  QuadMesh m = build_mesh(6.0, 1.0, 6, 1);
  // y = 1.0 is a grid line: every node of the top row sits on the crack.
  CrackPath on_line = edge_crack({0.0, 1.0}, {2.45, 1.0});
  CHECK_THROWS_AS(classify_elements(m, on_line), std::runtime_error);
}

TEST_CASE("tips of edge and center cracks") {
  CrackPath edge = edge_crack({0.0, 0.55}, {3.45, 0.55});
  auto et = edge.tips();
  REQUIRE(et.size() == 1);
  CHECK(et[0].end == 1);
  CHECK(et[0].active);
  CHECK(et[0].pos[0] == doctest::Approx(3.45));
  CHECK(et[0].angle == doctest::Approx(0.0));

  CrackPath center;
  center.pts = {{-1.0, 0.05}, {1.0, 0.05}};
  center.front_is_tip = true;
  center.front_active = true;
  auto ct = center.tips();
  REQUIRE(ct.size() == 2);
  CHECK(ct[0].end == 0);
  CHECK(ct[1].end == 1);
  // Front tip grows backwards along the first segment.
  CHECK(std::abs(std::fmod(ct[0].angle - ct[1].angle, 2.0 * 3.141592653589793)) ==
        doctest::Approx(3.141592653589793).epsilon(1e-12));

  center.extend(0, {-2.0, 0.05});
  center.extend(1, {2.0, 0.05});
  CHECK(center.pts.front()[0] == doctest::Approx(-2.0));
  CHECK(center.pts.back()[0] == doctest::Approx(2.0));
  CHECK(center.length() == doctest::Approx(4.0).epsilon(1e-12));

  center.deactivate(0);
  auto ct2 = center.tips();
  CHECK_FALSE(ct2[0].active);
  CHECK(ct2[1].active);
  CHECK_THROWS_AS(center.extend(0, {-3.0, 0.05}), std::logic_error);
}

TEST_CASE("tip frame polar coordinates") {
  CrackTip tip;
  tip.pos = {0.0, 0.0};
  tip.angle = 0.0;

  auto ahead = tip_polar(tip, {1.0, 0.0});
  CHECK(ahead[0] == doctest::Approx(1.0));
  CHECK(ahead[1] == doctest::Approx(0.0));

  auto behind = tip_polar(tip, {-1.0, 0.0});
  CHECK(behind[0] == doctest::Approx(1.0));
  CHECK(std::abs(behind[1]) == doctest::Approx(3.141592653589793).epsilon(1e-12));

  auto above = tip_polar(tip, {0.0, 1.0});
  CHECK(above[0] == doctest::Approx(1.0));
  CHECK(above[1] == doctest::Approx(3.141592653589793 / 2.0).epsilon(1e-12));

  CrackTip rot;
  rot.pos = {2.0, 3.0};
  rot.angle = 3.141592653589793 / 2.0;
  auto up = tip_polar(rot, {2.0, 4.0});
  CHECK(up[0] == doctest::Approx(1.0));
  CHECK(up[1] == doctest::Approx(0.0).epsilon(1e-12));
  auto left = tip_polar(rot, {1.0, 3.0});
  CHECK(left[0] == doctest::Approx(1.0));
  CHECK(left[1] == doctest::Approx(3.141592653589793 / 2.0).epsilon(1e-12));
}

TEST_CASE("split set grows monotonically under kinked growth") {
  QuadMesh m = build_mesh(20.0, 20.0, 20, 20);
  CrackPath c = edge_crack({0.0, 10.3}, {3.4, 10.3});
  Physics phys;

  std::mt19937 rng(91);
  std::uniform_real_distribution<double> kink(-25.0 * 3.141592653589793 / 180.0,
                                              25.0 * 3.141592653589793 / 180.0);

  std::set<int> prev_split;
  {
    Classification cls = classify_elements(m, c);
    prev_split.insert(cls.split_elems.begin(), cls.split_elems.end());
  }

  for (int step = 0; step < 5; ++step) {
    AdvanceOutcome out = advance_tip(c, 1, kink(rng), 2.2, m, phys);
    REQUIRE_FALSE(out.deactivated);
    Classification cls = classify_elements(m, c);

    std::set<int> split(cls.split_elems.begin(), cls.split_elems.end());
    for (int e : prev_split) CHECK(split.count(e) == 1);
    CHECK(split.size() > prev_split.size());

    for (int e : cls.tip_elems) CHECK(split.count(e) == 0);
    prev_split = split;

    // Faces sampled off each chain midpoint disagree in sign.
    for (int e : cls.split_elems) {
      const auto& chain = cls.elems[static_cast<std::size_t>(e)].chain;
      REQUIRE(chain.size() >= 2);
      for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
        double mx = 0.5 * (chain[k][0] + chain[k + 1][0]);
        double my = 0.5 * (chain[k][1] + chain[k + 1][1]);
        double tx = chain[k + 1][0] - chain[k][0];
        double ty = chain[k + 1][1] - chain[k][1];
        double len = std::hypot(tx, ty);
        REQUIRE(len > 0.0);
        double nxn = -ty / len, nyn = tx / len;
        double eps = 1e-4;
        CHECK(signed_side(c, {mx + eps * nxn, my + eps * nyn}) == 1.0);
        CHECK(signed_side(c, {mx - eps * nxn, my - eps * nyn}) == -1.0);
      }
    }
  }
}

TEST_CASE("classification is invariant under whole-cell translation") {
  QuadMesh m = build_mesh(20.0, 20.0, 20, 20);
  CrackPath base = edge_crack({0.0, 6.3}, {5.45, 6.3});
  base.extend(1, {7.35, 7.6});

  Classification ref = classify_elements(m, base);

  for (int shift : {3, 7}) {
    CrackPath moved = base;
    for (auto& p : moved.pts) p[1] += static_cast<double>(shift);
    Classification got = classify_elements(m, moved);
    int off = shift * m.nx;
    for (int e = 0; e < m.elem_count(); ++e) {
      int j = e / m.nx;
      if (j + shift >= m.ny) continue;
      CHECK(got.elems[static_cast<std::size_t>(e + off)].cls ==
            ref.elems[static_cast<std::size_t>(e)].cls);
    }
  }
}
