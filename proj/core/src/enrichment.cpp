#include "durx/enrichment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "durx/quadrature.hpp"

namespace durx {

BranchEval branch_functions(const CrackTip& tip, Vec2 p) {
  auto [r, th] = tip_polar(tip, p);
  if (r <= 0.0) throw std::domain_error("branch_functions: point at the tip");
  const double sr = std::sqrt(r);
  const double s2 = std::sin(0.5 * th), c2 = std::cos(0.5 * th);
  const double st = std::sin(th), ct = std::cos(th);

  BranchEval b;
  b.f = {sr * s2, sr * c2, sr * st * s2, sr * st * c2};

  // d/dr and d/dtheta, then to local Cartesian, then rotated global.
  const double fr[4] = {s2 / (2.0 * sr), c2 / (2.0 * sr), st * s2 / (2.0 * sr),
                        st * c2 / (2.0 * sr)};
  const double ft[4] = {0.5 * sr * c2, -0.5 * sr * s2,
                        sr * (ct * s2 + 0.5 * st * c2),
                        sr * (ct * c2 - 0.5 * st * s2)};
  const double c = std::cos(tip.angle), s = std::sin(tip.angle);
  for (int k = 0; k < 4; ++k) {
    double dxl = fr[k] * ct - ft[k] * st / r;
    double dyl = fr[k] * st + ft[k] * ct / r;
    b.dx[k] = c * dxl - s * dyl;
    b.dy[k] = s * dxl + c * dyl;
  }
  return b;
}

DofMap DofMap::create(int n_nodes) {
  DofMap m;
  m.n_nodes = n_nodes;
  m.total = 2 * n_nodes;
  m.node_enr.resize(static_cast<size_t>(n_nodes));
  m.retired.assign(static_cast<size_t>(m.total), 0);
  return m;
}

int DofMap::active_count() const {
  int n = 0;
  for (char r : retired) n += (r == 0);
  return n;
}

namespace {

bool same_frame(const CrackTip& a, const CrackTip& b) {
  return std::abs(a.pos[0] - b.pos[0]) < 1e-12 && std::abs(a.pos[1] - b.pos[1]) < 1e-12 &&
         std::abs(a.angle - b.angle) < 1e-12;
}

void retire_record(DofMap& map, int rec, DofUpdate& upd) {
  Enrichment& e = map.enrichments[static_cast<size_t>(rec)];
  e.active = false;
  upd.retired_enr.push_back(rec);
  for (int d = 0; d < e.n_dofs(); ++d) {
    map.retired[static_cast<size_t>(e.dof_base + d)] = 1;
    upd.retired_dofs.push_back(e.dof_base + d);
  }
}

void append_record(DofMap& map, Enrichment e, DofUpdate& upd) {
  e.dof_base = map.total;
  map.total += e.n_dofs();
  map.retired.resize(static_cast<size_t>(map.total), 0);
  for (int d = 0; d < e.n_dofs(); ++d) upd.new_dofs.push_back(e.dof_base + d);
  upd.new_enr.push_back(static_cast<int>(map.enrichments.size()));
  map.node_enr[static_cast<size_t>(e.node)].push_back(static_cast<int>(map.enrichments.size()));
  map.enrichments.push_back(e);
}

// A step dof whose support lies almost entirely on one side of the
// crack is numerically dependent on the standard basis and wrecks the
// conditioning of K.  The node qualifies only when quadrature sees
// both sides at non-negligible area; a side it cannot see at all would
// integrate to a near-zero row.  Cut area only grows as the crack
// extends, so a node that qualifies once keeps qualifying.
bool both_sides_substantial(const QuadMesh& mesh, const CrackPath& crack, int nid) {
  const GaussRule& g = gauss_rule(6);
  const double jw = 0.25 * mesh.dx * mesh.dy;
  double area[2] = {0.0, 0.0};
  const int i = nid % (mesh.nx + 1), j = nid / (mesh.nx + 1);
  for (int dj = -1; dj <= 0; ++dj)
    for (int di = -1; di <= 0; ++di) {
      const int ei = i + di, ej = j + dj;
      if (ei < 0 || ei >= mesh.nx || ej < 0 || ej >= mesh.ny) continue;
      const int e = mesh.elem_id(ei, ej);
      for (const auto& q : g.points) {
        auto [x, y] = mesh.to_physical(e, q.xi, q.eta);
        area[signed_side(crack, {x, y}) > 0.0 ? 0 : 1] += q.weight * jw;
      }
    }
  const double floor_area = 1e-4 * mesh.dx * mesh.dy;
  return std::min(area[0], area[1]) >= floor_area;
}

}  // namespace

DofUpdate update_dof_map(DofMap& map, const QuadMesh& mesh,
                         const Classification& cls, const CrackPath& crack) {
  DofUpdate upd;
  auto tips = crack.tips();

  // Nodes of each active tip element, then split-element nodes that are
  // not tip nodes.  Sorted sets keep the appended dof order repeatable.
  std::vector<std::set<int>> tip_nodes(tips.size());
  std::set<int> all_tip_nodes;
  for (int e : cls.tip_elems) {
    const ElemCut& cut = cls.elems[static_cast<size_t>(e)];
    for (int nid : mesh.elems[static_cast<size_t>(e)]) {
      tip_nodes[static_cast<size_t>(cut.tip)].insert(nid);
      all_tip_nodes.insert(nid);
    }
  }
  std::set<int> split_nodes;
  for (int e : cls.split_elems)
    for (int nid : mesh.elems[static_cast<size_t>(e)])
      if (!all_tip_nodes.count(nid)) split_nodes.insert(nid);

  // Retire tip records whose node left the tip set or whose frame is
  // stale; the replacement block is appended below.
  for (size_t rec = 0; rec < map.enrichments.size(); ++rec) {
    Enrichment& e = map.enrichments[rec];
    if (!e.active || e.kind != EnrichKind::tip) continue;
    bool keep = e.tip < static_cast<int>(tips.size()) && tips[static_cast<size_t>(e.tip)].active &&
                tip_nodes[static_cast<size_t>(e.tip)].count(e.node) &&
                same_frame(e.frame, tips[static_cast<size_t>(e.tip)]);
    if (!keep) retire_record(map, static_cast<int>(rec), upd);
  }

  for (size_t t = 0; t < tips.size(); ++t) {
    for (int nid : tip_nodes[t]) {
      bool have = false;
      for (int rec : map.node_enr[static_cast<size_t>(nid)]) {
        const Enrichment& e = map.enrichments[static_cast<size_t>(rec)];
        if (e.active && e.kind == EnrichKind::tip && e.tip == static_cast<int>(t)) have = true;
      }
      if (!have) {
        Enrichment e;
        e.kind = EnrichKind::tip;
        e.node = nid;
        e.tip = static_cast<int>(t);
        e.frame = tips[t];
        append_record(map, e, upd);
      }
    }
  }

  for (int nid : split_nodes) {
    bool have = false;
    for (int rec : map.node_enr[static_cast<size_t>(nid)]) {
      const Enrichment& e = map.enrichments[static_cast<size_t>(rec)];
      if (e.active && e.kind == EnrichKind::heaviside) have = true;
    }
    if (!have && both_sides_substantial(mesh, crack, nid)) {
      Enrichment e;
      e.kind = EnrichKind::heaviside;
      e.node = nid;
      e.side_at_node = signed_side(crack, mesh.nodes[static_cast<size_t>(nid)]);
      append_record(map, e, upd);
    }
  }

  std::sort(upd.retired_dofs.begin(), upd.retired_dofs.end());
  return upd;
}

}  // namespace durx
