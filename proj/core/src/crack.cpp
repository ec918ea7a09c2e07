#include "durx/crack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace durx {

namespace {

double dist2(Vec2 a, Vec2 b) {
  double dx = a[0] - b[0], dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

double seg_angle(Vec2 from, Vec2 to) {
  return std::atan2(to[1] - from[1], to[0] - from[0]);
}

// Clips segment a-b to [x0,x1]x[y0,y1]; returns the parameter interval
// or false when the overlap is empty.
bool clip_to_rect(Vec2 a, Vec2 b, double x0, double x1, double y0, double y1,
                  double& t0, double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  const double d[2] = {b[0] - a[0], b[1] - a[1]};
  const double lo[2] = {x0, y0}, hi[2] = {x1, y1};
  for (int ax = 0; ax < 2; ++ax) {
    if (std::abs(d[ax]) < 1e-300) {
      if (a[ax] < lo[ax] || a[ax] > hi[ax]) return false;
      continue;
    }
    double ta = (lo[ax] - a[ax]) / d[ax];
    double tb = (hi[ax] - a[ax]) / d[ax];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

std::vector<CrackTip> CrackPath::tips() const {
  if (pts.size() < 2) throw std::logic_error("crack path needs two points");
  std::vector<CrackTip> out;
  if (front_is_tip)
    out.push_back({pts.front(), seg_angle(pts[1], pts[0]), front_active, 0});
  size_t k = pts.size();
  out.push_back({pts.back(), seg_angle(pts[k - 2], pts[k - 1]), back_active, 1});
  return out;
}

void CrackPath::extend(int end, Vec2 new_tip) {
  if (end == 0) {
    if (!front_is_tip || !front_active)
      throw std::logic_error("extend: front end is not an active tip");
    pts.insert(pts.begin(), new_tip);
  } else {
    if (!back_active) throw std::logic_error("extend: back tip is inactive");
    pts.push_back(new_tip);
  }
}

void CrackPath::deactivate(int end) {
  if (end == 0)
    front_active = false;
  else
    back_active = false;
}

double CrackPath::length() const {
  double len = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) len += std::sqrt(dist2(pts[i - 1], pts[i]));
  return len;
}

double signed_side(const CrackPath& crack, Vec2 p) {
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_perp = 0.0;
  for (size_t i = 1; i < crack.pts.size(); ++i) {
    Vec2 a = crack.pts[i - 1], b = crack.pts[i];
    double ex = b[0] - a[0], ey = b[1] - a[1];
    double len2 = ex * ex + ey * ey;
    if (len2 == 0.0) continue;
    double t = std::clamp(((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2, 0.0, 1.0);
    Vec2 proj{a[0] + t * ex, a[1] + t * ey};
    double d2 = dist2(p, proj);
    double perp = (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / std::sqrt(len2);
    if (d2 < best_d2 * (1.0 - 1e-12) - 1e-300) {
      best_d2 = d2;
      best_perp = perp;
    } else if (d2 <= best_d2 * (1.0 + 1e-12) && std::abs(perp) > std::abs(best_perp)) {
      // Equidistant at a shared vertex: the segment the point is
      // farther off of decides the side.
      best_d2 = std::min(best_d2, d2);
      best_perp = perp;
    }
  }
  if (best_perp == 0.0) throw std::domain_error("signed_side: point lies on the crack");
  return best_perp > 0.0 ? 1.0 : -1.0;
}

Classification classify_elements(const QuadMesh& mesh, const CrackPath& crack) {
  Classification out;
  out.elems.resize(static_cast<size_t>(mesh.elem_count()));
  if (crack.pts.size() < 2) return out;

  const double h = std::min(mesh.dx, mesh.dy);
  const double tiny = 1e-12 * h;

  // Collect, per element, the clipped crack portion in path order.
  std::map<int, std::vector<Vec2>> chains;
  for (size_t s = 1; s < crack.pts.size(); ++s) {
    Vec2 a = crack.pts[s - 1], b = crack.pts[s];
    int i0 = std::clamp(static_cast<int>(std::floor(std::min(a[0], b[0]) / mesh.dx)) - 1, 0, mesh.nx - 1);
    int i1 = std::clamp(static_cast<int>(std::floor(std::max(a[0], b[0]) / mesh.dx)) + 1, 0, mesh.nx - 1);
    int j0 = std::clamp(static_cast<int>(std::floor(std::min(a[1], b[1]) / mesh.dy)) - 1, 0, mesh.ny - 1);
    int j1 = std::clamp(static_cast<int>(std::floor(std::max(a[1], b[1]) / mesh.dy)) + 1, 0, mesh.ny - 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        double t0, t1;
        if (!clip_to_rect(a, b, i * mesh.dx, (i + 1) * mesh.dx, j * mesh.dy,
                          (j + 1) * mesh.dy, t0, t1))
          continue;
        Vec2 p0{a[0] + t0 * (b[0] - a[0]), a[1] + t0 * (b[1] - a[1])};
        Vec2 p1{a[0] + t1 * (b[0] - a[0]), a[1] + t1 * (b[1] - a[1])};
        if (dist2(p0, p1) < tiny * tiny) continue;
        auto& chain = chains[mesh.elem_id(i, j)];
        if (chain.empty()) {
          chain.push_back(p0);
        } else if (dist2(chain.back(), p0) > tiny * tiny) {
          throw std::runtime_error("classify_elements: crack re-enters an element it already left");
        }
        chain.push_back(p1);
      }
    }
  }

  // A node on the crack makes the side field ill defined.
  for (const auto& [e, chain] : chains) {
    for (auto nid : mesh.elems[static_cast<size_t>(e)]) {
      Vec2 nd = mesh.nodes[static_cast<size_t>(nid)];
      for (size_t i = 1; i < chain.size(); ++i) {
        Vec2 a = chain[i - 1], b = chain[i];
        double ex = b[0] - a[0], ey = b[1] - a[1];
        double len2 = ex * ex + ey * ey;
        if (len2 == 0.0) continue;
        double t = std::clamp(((nd[0] - a[0]) * ex + (nd[1] - a[1]) * ey) / len2, 0.0, 1.0);
        if (dist2(nd, {a[0] + t * ex, a[1] + t * ey}) < 1e-16 * h * h)
          throw std::runtime_error("classify_elements: mesh node lies on the crack; shift the crack geometry off the grid lines");
      }
    }
  }

  // Tip elements take precedence over the split test.
  auto tips = crack.tips();
  std::vector<int> tip_elem_of(tips.size(), -1);
  for (size_t t = 0; t < tips.size(); ++t) {
    if (!tips[t].active) continue;
    int e = mesh.locate(tips[t].pos[0], tips[t].pos[1]);
    if (e < 0) throw std::runtime_error("classify_elements: crack tip left the domain");
    tip_elem_of[t] = e;
  }

  for (auto& [e, chain] : chains) {
    double total = 0.0;
    for (size_t i = 1; i < chain.size(); ++i) total += std::sqrt(dist2(chain[i - 1], chain[i]));
    if (total < 1e-9 * h) continue;  // grazing a corner

    auto& cut = out.elems[static_cast<size_t>(e)];
    cut.chain = chain;
    auto tip_it = std::find(tip_elem_of.begin(), tip_elem_of.end(), e);
    if (tip_it != tip_elem_of.end()) {
      cut.cls = ElemClass::tip;
      cut.tip = static_cast<int>(tip_it - tip_elem_of.begin());
      // Chains follow path order, which puts a front tip first; the
      // integrator expects boundary entry first and the tip last.
      if (dist2(cut.chain.front(), tips[static_cast<size_t>(cut.tip)].pos) <
          dist2(cut.chain.back(), tips[static_cast<size_t>(cut.tip)].pos))
        std::reverse(cut.chain.begin(), cut.chain.end());
      out.tip_elems.push_back(e);
      continue;
    }
    bool pos = false, neg = false;
    for (auto nid : mesh.elems[static_cast<size_t>(e)]) {
      if (signed_side(crack, mesh.nodes[static_cast<size_t>(nid)]) > 0.0)
        pos = true;
      else
        neg = true;
    }
    if (pos && neg) {
      cut.cls = ElemClass::split;
      out.split_elems.push_back(e);
    } else {
      cut.chain.clear();  // touches but does not separate
    }
  }
  return out;
}

std::array<double, 2> tip_polar(const CrackTip& tip, Vec2 p) {
  double dx = p[0] - tip.pos[0], dy = p[1] - tip.pos[1];
  double c = std::cos(tip.angle), s = std::sin(tip.angle);
  double xl = c * dx + s * dy;
  double yl = -s * dx + c * dy;
  return {std::hypot(xl, yl), std::atan2(yl, xl)};
}

}  // namespace durx
