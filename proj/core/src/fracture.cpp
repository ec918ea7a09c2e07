#include "durx/fracture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace durx {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct AuxFields {
  double s11, s22, s12;  // stresses for a unit intensity factor
  double du1, du2;       // displacement gradient along the tip axis
};

// Leading-order tip fields in the tip frame.  kappa = 3 - 4 nu.
AuxFields aux_mode(int mode, double r, double theta, double kappa, double mu) {
  const double fac = 1.0 / std::sqrt(2.0 * kPi * r);
  const double t2 = 0.5 * theta;
  const double c2 = std::cos(t2), s2 = std::sin(t2);
  const double c32 = std::cos(3.0 * t2), s32 = std::sin(3.0 * t2);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cu = 0.5 / mu / std::sqrt(2.0 * kPi);

  AuxFields a{};
  double g1, g1p, g2, g2p;
  if (mode == 1) {
    a.s11 = fac * c2 * (1.0 - s2 * s32);
    a.s22 = fac * c2 * (1.0 + s2 * s32);
    a.s12 = fac * c2 * s2 * c32;
    g1 = c2 * (kappa - ct);
    g1p = -0.5 * s2 * (kappa - ct) + c2 * st;
    g2 = s2 * (kappa - ct);
    g2p = 0.5 * c2 * (kappa - ct) + s2 * st;
  } else {
    a.s11 = -fac * s2 * (2.0 + c2 * c32);
    a.s22 = fac * s2 * c2 * c32;
    a.s12 = fac * c2 * (1.0 - s2 * s32);
    g1 = s2 * (kappa + ct + 2.0);
    g1p = 0.5 * c2 * (kappa + ct + 2.0) - s2 * st;
    g2 = -c2 * (kappa + ct - 2.0);
    g2p = 0.5 * s2 * (kappa + ct - 2.0) + c2 * st;
  }
  const double inv = cu / std::sqrt(r);
  a.du1 = inv * (0.5 * g1 * ct - g1p * st);
  a.du2 = inv * (0.5 * g2 * ct - g2p * st);
  return a;
}

double dist_to_rect(Vec2 p, double x0, double y0, double x1, double y1) {
  const double dx = std::max({x0 - p[0], 0.0, p[0] - x1});
  const double dy = std::max({y0 - p[1], 0.0, p[1] - y1});
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

SifResult compute_sifs(const Assembler& as, const Classification& cls,
                       const CrackPath& crack, const CrackTip& tip,
                       const std::vector<double>& u, double rd_elems) {
  const QuadMesh& mesh = as.mesh();
  const Physics& phys = as.physics();
  const double h = mesh.char_length();
  const double r_full = rd_elems * h;

  double dmin = r_full / 0.95;
  for (const auto& hole : phys.holes) {
    const double d = std::hypot(hole.center[0] - tip.pos[0], hole.center[1] - tip.pos[1]);
    dmin = std::min(dmin, std::abs(d - hole.radius));
  }
  for (const auto& inc : phys.inclusions) {
    const double d = std::hypot(inc.center[0] - tip.pos[0], inc.center[1] - tip.pos[1]);
    dmin = std::min(dmin, std::abs(d - inc.radius));
  }
  dmin = std::min({dmin, tip.pos[0], mesh.width - tip.pos[0], tip.pos[1],
                   mesh.height - tip.pos[1]});

  SifResult res;
  double r_d = std::min(r_full, 0.95 * dmin);
  const double floor = std::min(2.0 * h, r_full);
  if (r_d < floor) {
    r_d = floor;
    res.warning = "interaction domain clipped by a nearby feature or boundary";
  }
  res.r_domain = r_d;
  const double r1 = 0.5 * r_d;

  const Material& mt = phys.mat_at(tip.pos);
  const double mu = mt.e / (2.0 * (1.0 + mt.nu));
  const double kappa = 3.0 - 4.0 * mt.nu;
  const double estar = mt.e / (1.0 - mt.nu * mt.nu);
  const double d11 = mt.e * (1.0 - mt.nu) / ((1.0 + mt.nu) * (1.0 - 2.0 * mt.nu));
  const double d12 = mt.e * mt.nu / ((1.0 + mt.nu) * (1.0 - 2.0 * mt.nu));
  const double ca = std::cos(tip.angle), sa = std::sin(tip.angle);

  const int i0 = std::max(0, static_cast<int>(std::floor((tip.pos[0] - r_d) / mesh.dx)));
  const int i1 = std::min(mesh.nx - 1, static_cast<int>(std::floor((tip.pos[0] + r_d) / mesh.dx)));
  const int j0 = std::max(0, static_cast<int>(std::floor((tip.pos[1] - r_d) / mesh.dy)));
  const int j1 = std::min(mesh.ny - 1, static_cast<int>(std::floor((tip.pos[1] + r_d) / mesh.dy)));

  double inter1 = 0.0, inter2 = 0.0;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const int e = mesh.elem_id(i, j);
      auto c = mesh.elem_coords(e);
      const double rmin = dist_to_rect(tip.pos, c[0][0], c[0][1], c[2][0], c[2][1]);
      if (rmin >= r_d) continue;
      double rmax = 0.0;
      for (const auto& corner : c)
        rmax = std::max(rmax, std::hypot(corner[0] - tip.pos[0], corner[1] - tip.pos[1]));
      if (rmax <= r1) continue;  // plateau interior, zero weight gradient
      bool voided = true;
      for (const auto& corner : c)
        if (!phys.in_hole(corner)) voided = false;
      if (voided) continue;

      const auto pts = as.integration_points(e, cls.elems[static_cast<std::size_t>(e)], true);
      for (const auto& q : pts) {
        if (phys.in_hole(q.x)) continue;
        auto [r, th] = tip_polar(tip, q.x);
        if (r >= r_d || r <= r1) continue;
        const double dqdr = -1.0 / (r_d - r1);
        const double cth = std::cos(th), sth = std::sin(th);
        const double gq1 = dqdr * cth, gq2 = dqdr * sth;

        const auto fs = as.sample(e, q.x, crack, u);
        const double g0 = fs.grad[0], g1 = fs.grad[1], g2 = fs.grad[2], g3 = fs.grad[3];
        // Rotate the displacement gradient into the tip frame.
        const double a0 = ca * g0 + sa * g2, a1 = ca * g1 + sa * g3;
        const double b0 = -sa * g0 + ca * g2, b1 = -sa * g1 + ca * g3;
        const double G11 = a0 * ca + a1 * sa;
        const double G12 = -a0 * sa + a1 * ca;
        const double G21 = b0 * ca + b1 * sa;
        const double G22 = -b0 * sa + b1 * ca;
        const double e11 = G11, e22 = G22, e12 = 0.5 * (G12 + G21);
        const double sr11 = d11 * e11 + d12 * e22;
        const double sr22 = d12 * e11 + d11 * e22;
        const double sr12 = 2.0 * mu * e12;

        for (int mode = 1; mode <= 2; ++mode) {
          const AuxFields ax = aux_mode(mode, r, th, kappa, mu);
          const double ea11 = ((1.0 - mt.nu) * ax.s11 - mt.nu * ax.s22) * (1.0 + mt.nu) / mt.e;
          const double ea22 = ((1.0 - mt.nu) * ax.s22 - mt.nu * ax.s11) * (1.0 + mt.nu) / mt.e;
          const double ea12 = ax.s12 * (1.0 + mt.nu) / mt.e;
          const double work = sr11 * ea11 + sr22 * ea22 + 2.0 * sr12 * ea12;
          const double p1 =
              sr11 * ax.du1 + sr12 * ax.du2 + ax.s11 * G11 + ax.s12 * G21 - work;
          const double p2 = sr12 * ax.du1 + sr22 * ax.du2 + ax.s12 * G11 + ax.s22 * G21;
          const double val = q.w * (gq1 * p1 + gq2 * p2);
          (mode == 1 ? inter1 : inter2) += val;
        }
      }
    }

  res.k1 = 0.5 * estar * inter1;
  res.k2 = 0.5 * estar * inter2;
  return res;
}

double propagation_angle(double k1, double k2) {
  if (std::abs(k2) < 1e-12 * std::max(std::abs(k1), 1e-300)) return 0.0;
  // Root of k1 sin t + k2 (3 cos t - 1) = 0 on the maximum-hoop-stress
  // branch; the other root of the quadratic is the minimum.
  const double disc = std::sqrt(k1 * k1 + 8.0 * k2 * k2);
  return 2.0 * std::atan((k1 - disc) / (4.0 * k2));
}

AdvanceOutcome advance_tip(CrackPath& crack, int end, double theta, double da,
                           const QuadMesh& mesh, const Physics& phys) {
  CrackTip tip;
  bool found = false;
  for (const auto& t : crack.tips())
    if (t.end == end) {
      tip = t;
      found = true;
    }
  if (!found || !tip.active) throw std::logic_error("advance_tip: no active tip at this end");

  const double ang = tip.angle + theta;
  Vec2 np{tip.pos[0] + da * std::cos(ang), tip.pos[1] + da * std::sin(ang)};

  // Keep the vertex off grid lines so no mesh node lands on the crack.
  const double eps = 1e-4 * da;
  auto nudge = [eps](double v, double cell, double extent) {
    const double m = v - cell * std::floor(v / cell);
    double out = v;
    if (m < eps)
      out = v + eps;
    else if (cell - m < eps)
      out = v - eps;
    return std::min(std::max(out, -extent), 2.0 * extent);
  };
  if (np[0] > 0.0 && np[0] < mesh.width) np[0] = nudge(np[0], mesh.dx, mesh.width);
  if (np[1] > 0.0 && np[1] < mesh.height) np[1] = nudge(np[1], mesh.dy, mesh.height);

  AdvanceOutcome out;
  crack.extend(end, np);
  const bool outside =
      np[0] <= 0.0 || np[0] >= mesh.width || np[1] <= 0.0 || np[1] >= mesh.height;
  if (outside) {
    crack.deactivate(end);
    out.deactivated = true;
    out.reason = "boundary";
  } else if (phys.in_hole(np)) {
    crack.deactivate(end);
    out.deactivated = true;
    out.reason = "hole";
  }
  return out;
}

}  // namespace durx
