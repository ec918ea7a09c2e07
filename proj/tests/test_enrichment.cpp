#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "durx/crack.hpp"
#include "durx/enrichment.hpp"
#include "durx/mesh.hpp"

using namespace durx;

namespace {

constexpr double kPi = 3.14159265358979323846;

CrackTip tip_at(double x, double y, double angle) {
  CrackTip t;
  t.pos = {x, y};
  t.angle = angle;
  return t;
}

}  // namespace

TEST_CASE("shifted step values") {
  CHECK(heaviside_shifted(1.0, 1.0) == 0.0);
  CHECK(heaviside_shifted(-1.0, -1.0) == 0.0);
  CHECK(heaviside_shifted(1.0, -1.0) == 2.0);
  CHECK(heaviside_shifted(-1.0, 1.0) == -2.0);
}

TEST_CASE("branch function point values") {
  CrackTip tip = tip_at(0.0, 0.0, 0.0);

  // Directly ahead: theta = 0, only the cos t/2 term survives.
  BranchEval ahead = branch_functions(tip, {1.0, 0.0});
  CHECK(ahead.f[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ahead.f[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ahead.f[2] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ahead.f[3] == doctest::Approx(0.0).epsilon(1e-14));

  // sqrt(r) scaling.
  BranchEval far = branch_functions(tip, {4.0, 0.0});
  CHECK(far.f[1] == doctest::Approx(2.0).epsilon(1e-14));

  // Straight above: r = 1, theta = pi/2.
  BranchEval up = branch_functions(tip, {0.0, 1.0});
  double c = std::sqrt(2.0) / 2.0;  // sin pi/4 = cos pi/4
  CHECK(up.f[0] == doctest::Approx(c).epsilon(1e-14));
  CHECK(up.f[1] == doctest::Approx(c).epsilon(1e-14));
  CHECK(up.f[2] == doctest::Approx(c).epsilon(1e-14));
  CHECK(up.f[3] == doctest::Approx(c).epsilon(1e-14));

  CHECK_THROWS_AS(branch_functions(tip, {0.0, 0.0}), std::domain_error);
}

TEST_CASE("branch values in a rotated frame") {
  const double ang = 0.3;
  CrackTip tip = tip_at(3.0, 4.0, ang);
  const double r = 2.25, th = 0.7;

  Vec2 p{3.0 + r * std::cos(ang + th), 4.0 + r * std::sin(ang + th)};
  BranchEval b = branch_functions(tip, p);

  double sr = std::sqrt(r);
  CHECK(b.f[0] == doctest::Approx(sr * std::sin(th / 2)).epsilon(1e-13));
  CHECK(b.f[1] == doctest::Approx(sr * std::cos(th / 2)).epsilon(1e-13));
  CHECK(b.f[2] == doctest::Approx(sr * std::sin(th) * std::sin(th / 2)).epsilon(1e-13));
  CHECK(b.f[3] == doctest::Approx(sr * std::sin(th) * std::cos(th / 2)).epsilon(1e-13));
}

TEST_CASE("only the first branch function jumps across the faces") {
  CrackTip tip = tip_at(0.0, 0.0, 0.0);
  BranchEval up = branch_functions(tip, {-1.0, 1e-12});
  BranchEval dn = branch_functions(tip, {-1.0, -1e-12});

  CHECK(up.f[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dn.f[0] == doctest::Approx(-1.0).epsilon(1e-9));
  for (int k = 1; k < 4; ++k)
    CHECK(std::abs(up.f[static_cast<std::size_t>(k)] - dn.f[static_cast<std::size_t>(k)]) <=
          1e-9);
}

TEST_CASE("branch gradients match finite differences") {
  CrackTip tip = tip_at(1.0, -0.5, 0.42);
  const double h = 1e-6;
  for (Vec2 p : {Vec2{2.1, 0.3}, Vec2{0.4, -1.2}, Vec2{1.7, -0.9}}) {
    BranchEval b = branch_functions(tip, p);
    BranchEval xp = branch_functions(tip, {p[0] + h, p[1]});
    BranchEval xm = branch_functions(tip, {p[0] - h, p[1]});
    BranchEval yp = branch_functions(tip, {p[0], p[1] + h});
    BranchEval ym = branch_functions(tip, {p[0], p[1] - h});
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(b.dx[k] == doctest::Approx((xp.f[k] - xm.f[k]) / (2 * h)).epsilon(1e-5));
      CHECK(b.dy[k] == doctest::Approx((yp.f[k] - ym.f[k]) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("dof map growth and retirement across a tip advance") {
  QuadMesh m = build_mesh(6.0, 1.0, 6, 1);
  CrackPath c;
  c.pts = {{0.0, 0.55}, {3.45, 0.55}};

  DofMap map = DofMap::create(m.node_count());
  CHECK(map.total == 2 * 14);
  CHECK(map.active_count() == 28);

  Classification cls = classify_elements(m, c);
  DofUpdate u1 = update_dof_map(map, m, cls, c);

  // Split columns 0..2 enrich nodes at x=0..2 on both rows with a step
  // record (12 dofs); the tip element enriches its four nodes (x=3,4)
  // with 8 branch dofs each.
  CHECK(u1.new_dofs.size() == 44);
  CHECK(u1.retired_dofs.empty());
  CHECK(map.total == 28 + 44);
  CHECK(std::is_sorted(u1.new_dofs.begin(), u1.new_dofs.end()));

  int n_step = 0, n_tip = 0;
  for (int id : u1.new_enr) {
    const auto& e = map.enrichments[static_cast<std::size_t>(id)];
    if (e.kind == EnrichKind::heaviside)
      ++n_step;
    else
      ++n_tip;
  }
  CHECK(n_step == 6);
  CHECK(n_tip == 4);

  // Same classification again: nothing to do.
  DofUpdate u_same = update_dof_map(map, m, cls, c);
  CHECK(u_same.new_dofs.empty());
  CHECK(u_same.retired_dofs.empty());

  // Advance the tip one element: the old tip block retires whole, the
  // nodes left behind pick up step records, and a fresh tip block lands
  // on the new tip element nodes.
  c.extend(1, {4.45, 0.55});
  Classification cls2 = classify_elements(m, c);
  DofUpdate u2 = update_dof_map(map, m, cls2, c);

  CHECK(u2.retired_dofs.size() == 32);
  CHECK(u2.new_dofs.size() == 36);
  for (int d : u2.retired_dofs) CHECK(map.retired[static_cast<std::size_t>(d)] == 1);
  CHECK(map.total == 28 + 44 + 36);
  CHECK(map.active_count() == 28 + 44 + 36 - 32);

  // Retired dofs never come back and ids never shift.
  std::set<int> fresh(u2.new_dofs.begin(), u2.new_dofs.end());
  for (int d : u2.retired_dofs) CHECK(fresh.count(d) == 0);
}

TEST_CASE("dof history is deterministic") {
  auto run_history = []() {
    QuadMesh m = build_mesh(6.0, 1.0, 6, 1);
    CrackPath c;
    c.pts = {{0.0, 0.55}, {3.45, 0.55}};
    DofMap map = DofMap::create(m.node_count());
    for (double tip_x : {3.45, 4.45, 5.45}) {
      c.pts.back()[0] = tip_x;
      Classification cls = classify_elements(m, c);
      update_dof_map(map, m, cls, c);
    }
    return map;
  };

  DofMap a = run_history();
  DofMap b = run_history();
  REQUIRE(a.total == b.total);
  REQUIRE(a.enrichments.size() == b.enrichments.size());
  for (std::size_t i = 0; i < a.enrichments.size(); ++i) {
    CHECK(a.enrichments[i].kind == b.enrichments[i].kind);
    CHECK(a.enrichments[i].node == b.enrichments[i].node);
    CHECK(a.enrichments[i].dof_base == b.enrichments[i].dof_base);
    CHECK(a.enrichments[i].active == b.enrichments[i].active);
  }
  CHECK(a.retired == b.retired);
}
