#include "durx/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "durx/quadrature.hpp"

namespace durx {

bool Physics::in_hole(Vec2 p) const {
  for (const auto& h : holes) {
    double dx = p[0] - h.center[0], dy = p[1] - h.center[1];
    if (dx * dx + dy * dy < h.radius * h.radius) return true;
  }
  return false;
}

const Material& Physics::mat_at(Vec2 p) const {
  for (const auto& inc : inclusions) {
    double dx = p[0] - inc.center[0], dy = p[1] - inc.center[1];
    if (dx * dx + dy * dy < inc.radius * inc.radius) return inc.mat;
  }
  return base;
}

bool operator==(const DofItem& a, const DofItem& b) {
  return a.dof == b.dof && a.node == b.node && a.comp == b.comp && a.kind == b.kind &&
         a.branch == b.branch && a.shift == b.shift && a.frame.pos == b.frame.pos &&
         a.frame.angle == b.frame.angle;
}

namespace {

struct Dmat {
  double d11, d12, d33;
};

Dmat plane_strain(const Material& m) {
  double c = m.e / ((1.0 + m.nu) * (1.0 - 2.0 * m.nu));
  return {c * (1.0 - m.nu), c * m.nu, 0.5 * c * (1.0 - 2.0 * m.nu)};
}

struct Rect {
  double x0, y0, x1, y1;
  double w() const { return x1 - x0; }
  double h() const { return y1 - y0; }
};

Vec2 rect_corner(const Rect& r, int k) {
  switch (k & 3) {
    case 0: return {r.x0, r.y0};
    case 1: return {r.x1, r.y0};
    case 2: return {r.x1, r.y1};
    default: return {r.x0, r.y1};
  }
}

// Position of a boundary point as a parameter in [0, 4): bottom,
// right, top, left edges in counterclockwise order.
double rect_param(const Rect& r, Vec2 p) {
  double tol = 1e-8 * std::max(r.w(), r.h());
  if (std::abs(p[1] - r.y0) < tol) return (p[0] - r.x0) / r.w();
  if (std::abs(p[0] - r.x1) < tol) return 1.0 + (p[1] - r.y0) / r.h();
  if (std::abs(p[1] - r.y1) < tol) return 2.0 + (r.x1 - p[0]) / r.w();
  if (std::abs(p[0] - r.x0) < tol) return 3.0 + (r.y1 - p[1]) / r.h();
  throw std::logic_error("rect_param: point not on the element boundary");
}

using Tri = std::array<Vec2, 3>;

double tri_area(const Tri& t) {
  return 0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) -
                (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]));
}

double poly_area(const std::vector<Vec2>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& u = p[i];
    const Vec2& v = p[(i + 1) % p.size()];
    a += u[0] * v[1] - v[0] * u[1];
  }
  return 0.5 * a;
}

bool point_in_tri(Vec2 p, const Tri& t, double tol) {
  for (int k = 0; k < 3; ++k) {
    Vec2 a = t[k], b = t[(k + 1) % 3];
    if ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < tol) return false;
  }
  return true;
}

// Ear clipping for small, almost convex polygons from crack cuts.
void ear_clip(std::vector<Vec2> poly, double drop_area, std::vector<Tri>& out,
              double& dropped) {
  if (poly_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  while (poly.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      std::size_t h = (i + poly.size() - 1) % poly.size();
      std::size_t j = (i + 1) % poly.size();
      Tri t{poly[h], poly[i], poly[j]};
      double a = tri_area(t);
      if (a <= 0.0) continue;
      bool ear = true;
      for (std::size_t k = 0; k < poly.size() && ear; ++k)
        if (k != h && k != i && k != j && point_in_tri(poly[k], t, 1e-14)) ear = false;
      if (!ear) continue;
      if (a > drop_area)
        out.push_back(t);
      else
        dropped += a;
      poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) throw std::runtime_error("ear_clip: degenerate cut polygon");
  }
  double a = tri_area({poly[0], poly[1], poly[2]});
  if (a > drop_area)
    out.push_back({poly[0], poly[1], poly[2]});
  else
    dropped += a;
}

// Rectangle corners strictly between two boundary parameters, walking
// counterclockwise from ta to tb.
void append_corners(const Rect& r, double ta, double tb, std::vector<Vec2>& out) {
  if (tb <= ta) tb += 4.0;
  for (int i = 1; i <= 4; ++i) {
    double tc = std::floor(ta) + i;
    if (tc <= ta + 1e-12 || tc >= tb - 1e-12) continue;
    out.push_back(rect_corner(r, static_cast<int>(tc) & 3));
  }
}

std::vector<Tri> split_subtris(const Rect& r, const std::vector<Vec2>& chain, double& dropped) {
  double t_in = rect_param(r, chain.front());
  double t_out = rect_param(r, chain.back());
  double drop = 1e-12 * r.w() * r.h();
  std::vector<Tri> out;

  std::vector<Vec2> a(chain.begin(), chain.end());
  append_corners(r, t_out, t_in, a);
  ear_clip(std::move(a), drop, out, dropped);

  std::vector<Vec2> b(chain.rbegin(), chain.rend());
  append_corners(r, t_in, t_out, b);
  ear_clip(std::move(b), drop, out, dropped);
  return out;
}

std::vector<Tri> tip_subtris(const Rect& r, const std::vector<Vec2>& chain, double& dropped) {
  if (chain.size() != 2)
    throw std::runtime_error("tip element contains a crack kink; decrease the growth increment or refine the mesh");
  Vec2 entry = chain.front(), tip = chain.back();
  double drop = 1e-12 * r.w() * r.h();

  std::vector<std::pair<double, Vec2>> bnd;
  for (int k = 0; k < 4; ++k) bnd.emplace_back(static_cast<double>(k), rect_corner(r, k));
  bnd.emplace_back(rect_param(r, entry), entry);
  std::sort(bnd.begin(), bnd.end(),
            [](const auto& u, const auto& v) { return u.first < v.first; });

  std::vector<Tri> out;
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    Tri t{tip, bnd[k].second, bnd[(k + 1) % bnd.size()].second};
    double a = tri_area(t);
    if (a > drop)
      out.push_back(t);
    else
      dropped += std::max(a, 0.0);
  }
  return out;
}

bool circle_meets_rect(Vec2 c, double rad, const Rect& r) {
  double dx = std::max({r.x0 - c[0], 0.0, c[0] - r.x1});
  double dy = std::max({r.y0 - c[1], 0.0, c[1] - r.y1});
  return dx * dx + dy * dy < rad * rad;
}

bool rect_inside_circle(Vec2 c, double rad, const Rect& r) {
  for (int k = 0; k < 4; ++k) {
    Vec2 p = rect_corner(r, k);
    double dx = p[0] - c[0], dy = p[1] - c[1];
    if (dx * dx + dy * dy >= rad * rad) return false;
  }
  return true;
}

}  // namespace

Assembler::Assembler(const QuadMesh& mesh, Physics phys)
    : mesh_(mesh), phys_(std::move(phys)) {
  records_.resize(static_cast<std::size_t>(mesh_.elem_count()));
  fully_void_.assign(static_cast<std::size_t>(mesh_.elem_count()), 0);
  // Void means the standard-pass quadrature sees nothing: every point
  // of the rule lands inside a hole.  The same pointwise test gates
  // integrate(), so voided dofs are exactly the rows assembly leaves
  // at zero; a purely geometric test would miss elements whose corner
  // slivers poke out of the hole between quadrature points.
  const GaussRule& g = gauss_rule(6);
  for (int e = 0; e < mesh_.elem_count(); ++e) {
    auto c = mesh_.elem_coords(e);
    Rect r{c[0][0], c[0][1], c[2][0], c[2][1]};
    bool holed = false;
    for (const auto& h : phys_.holes)
      if (circle_meets_rect(h.center, h.radius, r)) holed = true;
    if (!holed) continue;
    bool all_in = true;
    for (const auto& q : g.points) {
      auto [x, y] = mesh_.to_physical(e, q.xi, q.eta);
      if (!phys_.in_hole({x, y})) {
        all_in = false;
        break;
      }
    }
    if (all_in) fully_void_[static_cast<std::size_t>(e)] = 1;
  }
}

std::vector<DofItem> Assembler::build_items(int e, const DofMap& map,
                                            const Classification& cls) const {
  const ElemCut& cut = cls.elems[static_cast<std::size_t>(e)];
  std::vector<DofItem> items;
  for (int nid : mesh_.elems[static_cast<std::size_t>(e)]) {
    for (int c = 0; c < 2; ++c) {
      DofItem it;
      it.dof = map.std_dof(nid, c);
      it.node = nid;
      it.comp = c;
      items.push_back(it);
    }
    for (int rec : map.node_enr[static_cast<std::size_t>(nid)]) {
      const Enrichment& en = map.enrichments[static_cast<std::size_t>(rec)];
      if (!en.active) continue;
      if (en.kind == EnrichKind::heaviside) {
        // Identically zero unless the crack actually cuts this element.
        if (cut.cls == ElemClass::standard) continue;
        for (int c = 0; c < 2; ++c) {
          DofItem it;
          it.dof = en.dof_base + c;
          it.node = nid;
          it.comp = c;
          it.kind = ItemKind::heaviside;
          it.shift = en.side_at_node;
          items.push_back(it);
        }
      } else {
        BranchEval b = branch_functions(en.frame, mesh_.nodes[static_cast<std::size_t>(nid)]);
        for (int k = 0; k < 4; ++k)
          for (int c = 0; c < 2; ++c) {
            DofItem it;
            it.dof = en.dof_base + 2 * k + c;
            it.node = nid;
            it.comp = c;
            it.kind = ItemKind::tip;
            it.branch = k;
            it.shift = b.f[static_cast<std::size_t>(k)];
            it.frame = en.frame;
            items.push_back(it);
          }
      }
    }
  }
  std::sort(items.begin(), items.end(),
            [](const DofItem& a, const DofItem& b) { return a.dof < b.dof; });
  return items;
}

void Assembler::eval_items(const std::vector<DofItem>& items, const CrackPath& crack,
                           int e, Vec2 p, std::vector<ItemEval>& out) const {
  auto [xi, eta] = mesh_.to_reference(e, p[0], p[1]);
  ShapeEval s = shape_functions(xi, eta);
  const double cx = 2.0 / mesh_.dx, cy = 2.0 / mesh_.dy;
  const auto& conn = mesh_.elems[static_cast<std::size_t>(e)];

  double side = 0.0;
  bool side_done = false;
  const CrackTip* bf_frame = nullptr;
  BranchEval bf;

  out.resize(items.size());
  for (std::size_t q = 0; q < items.size(); ++q) {
    const DofItem& it = items[q];
    int a = 0;
    while (conn[static_cast<std::size_t>(a)] != it.node) ++a;
    double n = s.n[static_cast<std::size_t>(a)];
    double nx = s.dxi[static_cast<std::size_t>(a)] * cx;
    double ny = s.deta[static_cast<std::size_t>(a)] * cy;
    ItemEval& ev = out[q];
    switch (it.kind) {
      case ItemKind::standard:
        ev = {n, nx, ny};
        break;
      case ItemKind::heaviside: {
        if (!side_done) {
          side = signed_side(crack, p);
          side_done = true;
        }
        double psi = side - it.shift;
        ev = {n * psi, nx * psi, ny * psi};
        break;
      }
      case ItemKind::tip: {
        if (bf_frame == nullptr || bf_frame->pos != it.frame.pos ||
            bf_frame->angle != it.frame.angle) {
          bf = branch_functions(it.frame, p);
          bf_frame = &it.frame;
        }
        auto k = static_cast<std::size_t>(it.branch);
        double psi = bf.f[k] - it.shift;
        ev = {n * psi, nx * psi + n * bf.dx[k], ny * psi + n * bf.dy[k]};
        break;
      }
    }
  }
}

std::vector<Assembler::IntegrationPoint> Assembler::integration_points(
    int e, const ElemCut& cut, bool fine) const {
  auto c = mesh_.elem_coords(e);
  Rect rect{c[0][0], c[0][1], c[2][0], c[2][1]};
  const double area = rect.w() * rect.h();

  std::vector<IntegrationPoint> pts;
  double dropped = 0.0;
  if (cut.cls == ElemClass::standard) {
    const GaussRule& g = gauss_rule(fine ? 6 : 2);
    double jw = 0.25 * area;
    for (const auto& q : g.points) {
      auto [x, y] = mesh_.to_physical(e, q.xi, q.eta);
      pts.push_back({{x, y}, q.weight * jw});
    }
  } else {
    std::vector<Tri> tris = (cut.cls == ElemClass::split)
                                ? split_subtris(rect, cut.chain, dropped)
                                : tip_subtris(rect, cut.chain, dropped);
    for (const auto& t : tris) {
      double a = tri_area(t);
      const auto& rule = fine ? tri_rule_7() : tri_rule_3();
      for (const auto& q : rule) {
        Vec2 x{q.l1 * t[0][0] + q.l2 * t[1][0] + q.l3 * t[2][0],
               q.l1 * t[0][1] + q.l2 * t[1][1] + q.l3 * t[2][1]};
        pts.push_back({x, q.weight * a});
      }
    }
  }

  double wsum = dropped;
  for (const auto& q : pts) wsum += q.w;
  if (std::abs(wsum - area) > 1e-9 * area)
    throw std::runtime_error("integration_points: sub-triangulation does not cover the element");
  return pts;
}

void Assembler::integrate(int e, const ElemCut& cut, const std::vector<DofItem>& items,
                          const CrackPath& crack, std::vector<double>& pairs) const {
  const std::size_t ni = items.size();
  pairs.assign(ni * (ni + 1) / 2, 0.0);
  if (fully_void_[static_cast<std::size_t>(e)]) return;

  auto c = mesh_.elem_coords(e);
  Rect rect{c[0][0], c[0][1], c[2][0], c[2][1]};

  bool has_tip_items = false, any_enriched = false;
  for (const auto& it : items) {
    if (it.kind == ItemKind::tip) has_tip_items = true;
    if (it.kind != ItemKind::standard) any_enriched = true;
  }

  bool holed = false;
  for (const auto& h : phys_.holes)
    if (circle_meets_rect(h.center, h.radius, rect)) holed = true;
  bool interface = false;
  for (const auto& inc : phys_.inclusions)
    if (circle_meets_rect(inc.center, inc.radius, rect) &&
        !rect_inside_circle(inc.center, inc.radius, rect))
      interface = true;
  const bool featured = holed || interface;

  auto kernel = [](const Dmat& d, const ItemEval& bi, int ci, const ItemEval& bj, int cj) {
    if (ci == 0)
      return (cj == 0) ? d.d11 * bi.fx * bj.fx + d.d33 * bi.fy * bj.fy
                       : d.d12 * bi.fx * bj.fy + d.d33 * bi.fy * bj.fx;
    return (cj == 0) ? d.d12 * bi.fy * bj.fx + d.d33 * bi.fx * bj.fy
                     : d.d11 * bi.fy * bj.fy + d.d33 * bi.fx * bj.fx;
  };

  // Standard-by-standard entries never see the crack, so they use a
  // rule chosen from static geometry only and reproduce bit-identically
  // no matter how the element is cut later.
  std::vector<std::size_t> sid;
  std::vector<DofItem> sitems;
  for (std::size_t i = 0; i < ni; ++i)
    if (items[i].kind == ItemKind::standard) {
      sid.push_back(i);
      sitems.push_back(items[i]);
    }
  std::vector<ItemEval> ev;
  {
    ElemCut plain;
    auto pts = integration_points(e, plain, featured);
    for (const auto& q : pts) {
      if (holed && phys_.in_hole(q.x)) continue;
      Dmat d = plane_strain(phys_.mat_at(q.x));
      eval_items(sitems, crack, e, q.x, ev);
      for (std::size_t a = 0; a < sid.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b)
          pairs[sid[a] * (sid[a] + 1) / 2 + sid[b]] +=
              q.w * kernel(d, ev[a], sitems[a].comp, ev[b], sitems[b].comp);
    }
  }
  if (!any_enriched) return;

  // Entries with an enriched row or column resolve the cut geometry.
  auto pts = integration_points(e, cut, has_tip_items || featured);
  for (const auto& q : pts) {
    if (holed && phys_.in_hole(q.x)) continue;
    Dmat d = plane_strain(phys_.mat_at(q.x));
    eval_items(items, crack, e, q.x, ev);
    for (std::size_t i = 0; i < ni; ++i) {
      const bool ie = items[i].kind != ItemKind::standard;
      for (std::size_t j = 0; j <= i; ++j) {
        if (!ie && items[j].kind == ItemKind::standard) continue;
        pairs[i * (i + 1) / 2 + j] +=
            q.w * kernel(d, ev[i], items[i].comp, ev[j], items[j].comp);
      }
    }
  }
}

SparseSpd Assembler::assemble(const DofMap& map, const Classification& cls,
                              const CrackPath& crack) {
  for (int e = 0; e < mesh_.elem_count(); ++e) {
    ElemRecord& r = records_[static_cast<std::size_t>(e)];
    r.cls = cls.elems[static_cast<std::size_t>(e)].cls;
    r.items = build_items(e, map, cls);
    integrate(e, cls.elems[static_cast<std::size_t>(e)], r.items, crack, r.pairs);
  }

  // Row patterns from node adjacency.  Standard rows see standard
  // columns only, so the leading block's pattern is final at baseline.
  // Enriched rows take every dof of their support so that a later
  // activation changes values, never storage.
  std::vector<std::set<int>> support(static_cast<std::size_t>(map.n_nodes));
  for (int e = 0; e < mesh_.elem_count(); ++e)
    for (int a : mesh_.elems[static_cast<std::size_t>(e)])
      for (int b : mesh_.elems[static_cast<std::size_t>(e)])
        support[static_cast<std::size_t>(a)].insert(b);

  SparseSpd K;
  for (int nid = 0; nid < map.n_nodes; ++nid)
    for (int c = 0; c < 2; ++c) {
      int d = map.std_dof(nid, c);
      std::vector<int> colset;
      for (int nb : support[static_cast<std::size_t>(nid)])
        for (int cc = 0; cc < 2; ++cc)
          if (map.std_dof(nb, cc) <= d) colset.push_back(map.std_dof(nb, cc));
      std::sort(colset.begin(), colset.end());
      std::vector<double> zeros(colset.size(), 0.0);
      K.append_row(std::move(colset), std::move(zeros));
    }
  for (std::size_t rec = 0; rec < map.enrichments.size(); ++rec) {
    const Enrichment& en = map.enrichments[rec];
    for (int d = en.dof_base; d < en.dof_base + en.n_dofs(); ++d) {
      std::vector<int> colset{d};
      for (int nb : support[static_cast<std::size_t>(en.node)]) {
        for (int cc = 0; cc < 2; ++cc) colset.push_back(map.std_dof(nb, cc));
        for (int r2 : map.node_enr[static_cast<std::size_t>(nb)]) {
          const Enrichment& e2 = map.enrichments[static_cast<std::size_t>(r2)];
          if (!e2.active) continue;
          for (int d2 = e2.dof_base; d2 < e2.dof_base + e2.n_dofs(); ++d2)
            if (d2 <= d) colset.push_back(d2);
        }
      }
      std::sort(colset.begin(), colset.end());
      colset.erase(std::unique(colset.begin(), colset.end()), colset.end());
      std::vector<double> zeros(colset.size(), 0.0);
      K.append_row(std::move(colset), std::move(zeros));
    }
  }

  for (const auto& r : records_) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < r.items.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j, ++idx)
        if (r.pairs[idx] != 0.0) K.add(r.items[i].dof, r.items[j].dof, r.pairs[idx]);
  }
  // Retired dofs hold identity rows so a from-scratch pass reproduces
  // the delta-updated matrix exactly.
  for (int d = 0; d < map.total; ++d)
    if (map.retired[static_cast<std::size_t>(d)]) K.add(d, d, 1.0);
  return K;
}

DeltaResult Assembler::delta_update(SparseSpd& K, const DofMap& map,
                                    const Classification& cls, const CrackPath& crack,
                                    const DofUpdate& upd) {
  DeltaResult res;
  res.appended = upd.new_dofs;
  res.masked = upd.retired_dofs;

  std::set<int> cand;
  auto add_node_elems = [&](int nid) {
    int i = nid % (mesh_.nx + 1), j = nid / (mesh_.nx + 1);
    for (int dj = -1; dj <= 0; ++dj)
      for (int di = -1; di <= 0; ++di) {
        int ei = i + di, ej = j + dj;
        if (ei >= 0 && ei < mesh_.nx && ej >= 0 && ej < mesh_.ny)
          cand.insert(mesh_.elem_id(ei, ej));
      }
  };
  for (int rec : upd.new_enr) add_node_elems(map.enrichments[static_cast<std::size_t>(rec)].node);
  for (int rec : upd.retired_enr) add_node_elems(map.enrichments[static_cast<std::size_t>(rec)].node);
  for (int e = 0; e < mesh_.elem_count(); ++e)
    if (records_[static_cast<std::size_t>(e)].cls != cls.elems[static_cast<std::size_t>(e)].cls)
      cand.insert(e);

  // New rows carry their node's whole support as pattern so that later
  // growth only ever changes values in them.
  for (int d : upd.new_dofs) {
    const Enrichment* owner = nullptr;
    for (int rec : upd.new_enr) {
      const Enrichment& en = map.enrichments[static_cast<std::size_t>(rec)];
      if (d >= en.dof_base && d < en.dof_base + en.n_dofs()) owner = &en;
    }
    if (owner == nullptr) throw std::logic_error("delta_update: appended dof without a record");
    std::set<int> nbs;
    int i = owner->node % (mesh_.nx + 1), j = owner->node / (mesh_.nx + 1);
    for (int dj = -1; dj <= 0; ++dj)
      for (int di = -1; di <= 0; ++di) {
        int ei = i + di, ej = j + dj;
        if (ei >= 0 && ei < mesh_.nx && ej >= 0 && ej < mesh_.ny)
          for (int nb : mesh_.elems[static_cast<std::size_t>(mesh_.elem_id(ei, ej))]) nbs.insert(nb);
      }
    std::vector<int> colset{d};
    for (int nb : nbs) {
      for (int cc = 0; cc < 2; ++cc) colset.push_back(map.std_dof(nb, cc));
      for (int r2 : map.node_enr[static_cast<std::size_t>(nb)]) {
        const Enrichment& e2 = map.enrichments[static_cast<std::size_t>(r2)];
        if (!e2.active) continue;
        for (int d2 = e2.dof_base; d2 < e2.dof_base + e2.n_dofs(); ++d2)
          if (d2 <= d) colset.push_back(d2);
      }
    }
    std::sort(colset.begin(), colset.end());
    colset.erase(std::unique(colset.begin(), colset.end()), colset.end());
    std::vector<double> zeros(colset.size(), 0.0);
    K.append_row(std::move(colset), std::move(zeros));
  }

  std::set<int> value_changed;
  std::set<int> changed_cols;
  std::vector<double> fresh;
  for (int e : cand) {
    ElemRecord& old = records_[static_cast<std::size_t>(e)];
    std::vector<DofItem> items = build_items(e, map, cls);
    ElemClass c2 = cls.elems[static_cast<std::size_t>(e)].cls;
    if (old.cls == c2 && old.items == items) continue;

    integrate(e, cls.elems[static_cast<std::size_t>(e)], items, crack, fresh);

    std::vector<int> old_loc(items.size(), -1);
    for (std::size_t i = 0; i < items.size(); ++i)
      for (std::size_t k = 0; k < old.items.size(); ++k)
        if (old.items[k].dof == items[i].dof) old_loc[i] = static_cast<int>(k);

    std::size_t idx = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      bool i_new = std::binary_search(upd.new_dofs.begin(), upd.new_dofs.end(), items[i].dof);
      for (std::size_t j = 0; j <= i; ++j, ++idx) {
        if (old_loc[i] >= 0 && old_loc[j] >= 0) {
          // Both dofs survive: keep the cached value bit-exact.
          std::size_t a = static_cast<std::size_t>(std::max(old_loc[i], old_loc[j]));
          std::size_t b = static_cast<std::size_t>(std::min(old_loc[i], old_loc[j]));
          fresh[idx] = old.pairs[a * (a + 1) / 2 + b];
        } else if (fresh[idx] != 0.0) {
          K.add(items[i].dof, items[j].dof, fresh[idx]);
          // items sorted by dof, so j <= i; a pair whose row dof is not
          // newly appended re-sums an existing row.  The symmetric
          // partner row changes too, which matters for classification
          // even though the solver only borders the row side.
          if (!i_new) value_changed.insert(items[i].dof);
          if (!std::binary_search(upd.new_dofs.begin(), upd.new_dofs.end(), items[j].dof))
            changed_cols.insert(items[j].dof);
        }
      }
    }
    old.cls = c2;
    old.items = std::move(items);
    old.pairs = fresh;
  }

  std::set<int> changed(res.appended.begin(), res.appended.end());
  changed.insert(value_changed.begin(), value_changed.end());
  changed.insert(changed_cols.begin(), changed_cols.end());
  for (int r : upd.retired_dofs) {
    for (int s : K.coupled_rows(r)) changed.insert(s);
    K.mask_dof(r);
    changed.insert(r);
  }
  res.value_changed.assign(value_changed.begin(), value_changed.end());
  res.changed_rows.assign(changed.begin(), changed.end());
  return res;
}

std::vector<int> Assembler::voided_dofs() const {
  std::vector<int> out;
  if (phys_.holes.empty()) return out;
  for (int nid = 0; nid < mesh_.node_count(); ++nid) {
    int i = nid % (mesh_.nx + 1), j = nid / (mesh_.nx + 1);
    bool any = false, all = true;
    for (int dj = -1; dj <= 0; ++dj)
      for (int di = -1; di <= 0; ++di) {
        int ei = i + di, ej = j + dj;
        if (ei < 0 || ei >= mesh_.nx || ej < 0 || ej >= mesh_.ny) continue;
        any = true;
        if (!fully_void_[static_cast<std::size_t>(mesh_.elem_id(ei, ej))]) all = false;
      }
    if (any && all) {
      out.push_back(2 * nid);
      out.push_back(2 * nid + 1);
    }
  }
  return out;
}

Assembler::FieldSample Assembler::sample(int e, Vec2 p, const CrackPath& crack,
                                         const std::vector<double>& u) const {
  const ElemRecord& r = records_[static_cast<std::size_t>(e)];
  std::vector<ItemEval> ev;
  eval_items(r.items, crack, e, p, ev);
  FieldSample s;
  for (std::size_t i = 0; i < r.items.size(); ++i) {
    double ui = u[static_cast<std::size_t>(r.items[i].dof)];
    int c = r.items[i].comp;
    s.u[static_cast<std::size_t>(c)] += ui * ev[i].f;
    s.grad[static_cast<std::size_t>(2 * c)] += ui * ev[i].fx;
    s.grad[static_cast<std::size_t>(2 * c + 1)] += ui * ev[i].fy;
  }
  return s;
}

void add_point_load(const QuadMesh& mesh, Vec2 pos, Vec2 force, std::vector<double>& f) {
  int i = std::clamp(static_cast<int>(std::lround(pos[0] / mesh.dx)), 0, mesh.nx);
  int j = std::clamp(static_cast<int>(std::lround(pos[1] / mesh.dy)), 0, mesh.ny);
  int nid = mesh.node_id(i, j);
  f[static_cast<std::size_t>(2 * nid)] += force[0];
  f[static_cast<std::size_t>(2 * nid + 1)] += force[1];
}

void add_edge_traction(const QuadMesh& mesh, char edge, Vec2 traction,
                       const Classification& cls, const DofMap& map,
                       std::vector<double>& f) {
  auto loaded = [&](int e, int na, int nb, double len) {
    if (cls.elems[static_cast<std::size_t>(e)].cls != ElemClass::standard)
      throw std::runtime_error("edge traction on a crack-cut element is not supported");
    for (int nid : {na, nb})
      for (int rec : map.node_enr[static_cast<std::size_t>(nid)])
        if (map.enrichments[static_cast<std::size_t>(rec)].active &&
            map.enrichments[static_cast<std::size_t>(rec)].kind == EnrichKind::tip)
          throw std::runtime_error("edge traction on a tip-enriched edge is not supported");
    for (int nid : {na, nb}) {
      f[static_cast<std::size_t>(2 * nid)] += 0.5 * len * traction[0];
      f[static_cast<std::size_t>(2 * nid + 1)] += 0.5 * len * traction[1];
    }
  };
  if (edge == 'b' || edge == 't') {
    int j = (edge == 'b') ? 0 : mesh.ny;
    int ej = (edge == 'b') ? 0 : mesh.ny - 1;
    for (int i = 0; i < mesh.nx; ++i)
      loaded(mesh.elem_id(i, ej), mesh.node_id(i, j), mesh.node_id(i + 1, j), mesh.dx);
  } else if (edge == 'l' || edge == 'r') {
    int i = (edge == 'l') ? 0 : mesh.nx;
    int ei = (edge == 'l') ? 0 : mesh.nx - 1;
    for (int j = 0; j < mesh.ny; ++j)
      loaded(mesh.elem_id(ei, j), mesh.node_id(i, j), mesh.node_id(i, j + 1), mesh.dy);
  } else {
    throw std::invalid_argument("edge must be one of b, t, l, r");
  }
}

}  // namespace durx
