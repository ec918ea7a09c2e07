#include "durx/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "durx/fracture.hpp"
#include "durx/io.hpp"

namespace durx {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void merge_sorted(std::vector<int>& dst, const std::vector<int>& add) {
  if (add.empty()) return;
  dst.insert(dst.end(), add.begin(), add.end());
  std::sort(dst.begin(), dst.end());
  dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
}

}  // namespace

std::pair<double, double> error_metrics(const std::vector<double>& u_test,
                                        const std::vector<double>& u_ref,
                                        const std::vector<double>& vm_test,
                                        const std::vector<double>& vm_ref) {
  if (u_test.size() != u_ref.size() || vm_test.size() != vm_ref.size())
    throw std::invalid_argument("error_metrics: field sizes differ");
  auto rel = [](const std::vector<double>& a, const std::vector<double>& b) {
    double dn = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dn += (a[i] - b[i]) * (a[i] - b[i]);
    double bn = norm2(b);
    if (bn == 0.0) throw std::invalid_argument("error_metrics: reference field is zero");
    return 100.0 * std::sqrt(dn) / bn;
  };
  return {rel(u_test, u_ref), rel(vm_test, vm_ref)};
}

std::vector<double> nodal_von_mises(const Assembler& as, const CrackPath& crack,
                                    const std::vector<double>& u) {
  const QuadMesh& mesh = as.mesh();
  const Physics& phys = as.physics();
  const std::size_t nn = static_cast<std::size_t>(mesh.node_count());
  std::vector<double> sum(nn, 0.0);
  std::vector<int> cnt(nn, 0);

  const double g = 1.0 / std::sqrt(3.0);
  // Sample points and corners share the counterclockwise ordering, so
  // corner k extrapolates with weights 0.25 (1 + 3 xi_k xi_g)(...).
  const double sx[4] = {-g, g, g, -g};
  const double sy[4] = {-g, -g, g, g};
  const double cx[4] = {-1.0, 1.0, 1.0, -1.0};
  const double cy[4] = {-1.0, -1.0, 1.0, 1.0};

  for (int e = 0; e < mesh.elem_count(); ++e) {
    Vec2 p[4];
    double vm[4];
    bool usable = true;
    for (int q = 0; q < 4 && usable; ++q) {
      auto xy = mesh.to_physical(e, sx[q], sy[q]);
      p[q] = {xy[0], xy[1]};
      if (phys.in_hole(p[q])) usable = false;
    }
    if (!usable) continue;
    for (int q = 0; q < 4; ++q) {
      auto fs = as.sample(e, p[q], crack, u);
      const Material& m = phys.mat_at(p[q]);
      double c = m.e / ((1.0 + m.nu) * (1.0 - 2.0 * m.nu));
      double d11 = c * (1.0 - m.nu), d12 = c * m.nu, d33 = 0.5 * c * (1.0 - 2.0 * m.nu);
      double exx = fs.grad[0], eyy = fs.grad[3], gxy = fs.grad[1] + fs.grad[2];
      double sxx = d11 * exx + d12 * eyy;
      double syy = d12 * exx + d11 * eyy;
      double sxy = d33 * gxy;
      double szz = m.nu * (sxx + syy);
      vm[q] = std::sqrt(0.5 * ((sxx - syy) * (sxx - syy) + (syy - szz) * (syy - szz) +
                               (szz - sxx) * (szz - sxx)) +
                        3.0 * sxy * sxy);
    }
    for (int k = 0; k < 4; ++k) {
      double val = 0.0;
      for (int q = 0; q < 4; ++q)
        val += 0.25 * (1.0 + 3.0 * cx[k] * sx[q]) * (1.0 + 3.0 * cy[k] * sy[q]) * vm[q];
      int nid = mesh.elems[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)];
      sum[static_cast<std::size_t>(nid)] += val;
      cnt[static_cast<std::size_t>(nid)] += 1;
    }
  }
  for (std::size_t i = 0; i < nn; ++i)
    if (cnt[i]) sum[i] /= cnt[i];
  return sum;
}

std::vector<int> boundary_masked_dofs(const RunConfig& cfg, const Assembler& as,
                                      const DofMap& map) {
  const QuadMesh& mesh = as.mesh();
  std::vector<int> out = as.voided_dofs();
  for (int nid = 0; nid < mesh.node_count(); ++nid) {
    int i = nid % (mesh.nx + 1), j = nid / (mesh.nx + 1);
    bool fixed = (cfg.fixed_edges.find('b') != std::string::npos && j == 0) ||
                 (cfg.fixed_edges.find('t') != std::string::npos && j == mesh.ny) ||
                 (cfg.fixed_edges.find('l') != std::string::npos && i == 0) ||
                 (cfg.fixed_edges.find('r') != std::string::npos && i == mesh.nx);
    if (fixed) {
      out.push_back(map.std_dof(nid, 0));
      out.push_back(map.std_dof(nid, 1));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> build_loads(const RunConfig& cfg, const QuadMesh& mesh,
                                const Classification& cls, const DofMap& map) {
  std::vector<double> f(static_cast<std::size_t>(map.total), 0.0);
  for (const auto& pl : cfg.point_loads) add_point_load(mesh, pl.pos, pl.force, f);
  for (const auto& el : cfg.edge_loads)
    add_edge_traction(mesh, el.edge, el.traction, cls, map, f);
  return f;
}

RunResult run(const RunConfig& cfg, bool write_files) {
  validate_config(cfg);
  const bool do_dur = cfg.mode != "full";
  const bool do_full = cfg.mode != "dur";

  QuadMesh mesh = build_mesh(cfg.width, cfg.height, cfg.nx, cfg.ny);
  Physics phys{cfg.material, cfg.inclusions, cfg.holes};

  CrackPath crack;
  crack.pts = cfg.crack_points;
  crack.front_is_tip = cfg.tip_front;
  crack.front_active = cfg.tip_front;
  crack.back_active = cfg.tip_back;

  Assembler as_dur(mesh, phys);
  Assembler as_full(mesh, phys);
  const Assembler& as_drive = do_full ? as_full : as_dur;

  DofMap map = DofMap::create(mesh.node_count());
  DurEngine eng({cfg.eta, 1e-9, 1e-12, 2 * mesh.node_count()});
  EnvelopeCholesky chol_full;
  SparseSpd K;
  std::vector<double> F;
  std::vector<int> bc_mask;
  std::vector<double> u_dur, u_full;

  RunResult out;
  CsvTable path_csv({"step", "tip", "x", "y"});
  CsvTable err_csv({"step", "e_u_percent", "e_sigma_percent"});
  CsvTable tim_csv({"step", "n_changed", "n_total", "eta_percent", "t_classify_s",
                    "t_update_local_s", "t_assemble_full_s", "t_solve_dur_s",
                    "t_solve_full_s", "mode", "residual"});
  {
    auto tips0 = crack.tips();
    for (std::size_t i = 0; i < tips0.size(); ++i)
      path_csv.add_row({"0", CsvTable::num(static_cast<int>(i)),
                        CsvTable::num(tips0[i].pos[0]), CsvTable::num(tips0[i].pos[1])});
  }
  if (write_files) ensure_dir(cfg.out_dir);

  for (int step = 1; step <= cfg.max_steps; ++step) {
    StepReport rep;
    rep.step = step;
    const bool first = step == 1;

    double t0 = now_seconds();
    Classification cls = classify_elements(mesh, crack);
    DofUpdate upd = update_dof_map(map, mesh, cls, crack);
    rep.t_classify = now_seconds() - t0;

    if (first) {
      // Pinned rows and loads are fixed for the whole run; growth only
      // appends zero-loaded enriched dofs.
      bc_mask = boundary_masked_dofs(cfg, as_drive, map);
      F = build_loads(cfg, mesh, cls, map);
      for (int d : bc_mask) F[static_cast<std::size_t>(d)] = 0.0;
    } else {
      F.resize(static_cast<std::size_t>(map.total), 0.0);
    }

    if (do_dur) {
      t0 = now_seconds();
      if (first) {
        K = as_dur.assemble(map, cls, crack);
        for (int d : bc_mask) K.mask_dof(d);
        rep.t_update_local = now_seconds() - t0;
        t0 = now_seconds();
        u_dur = eng.baseline(K, F, &rep.dur_stats);
        rep.t_solve_dur = now_seconds() - t0;
        out.leading_flops_after_baseline = eng.factor().leading_flops();
      } else {
        DeltaResult delta = as_dur.delta_update(K, map, cls, crack, upd);
        // Growth through a pinned or voided row would re-couple it, so
        // pin again and count any row that moved as re-summed.
        std::vector<int> remask;
        for (int d : bc_mask) merge_sorted(remask, K.mask_dof(d));
        std::vector<int> not_new;
        for (int r : remask)
          if (!std::binary_search(delta.appended.begin(), delta.appended.end(), r))
            not_new.push_back(r);
        merge_sorted(delta.value_changed, not_new);
        merge_sorted(delta.changed_rows, remask);
        rep.t_update_local = now_seconds() - t0;
        t0 = now_seconds();
        u_dur = eng.step(K, F, delta, &rep.dur_stats);
        rep.t_solve_dur = now_seconds() - t0;
      }
      out.leading_flops_final = eng.factor().leading_flops();
      rep.n_changed = rep.dur_stats.n_changed;
      rep.eta = rep.dur_stats.eta_percent;
    }
    if (do_full) {
      t0 = now_seconds();
      SparseSpd K2 = as_full.assemble(map, cls, crack);
      for (int d : bc_mask) K2.mask_dof(d);
      rep.t_assemble_full = now_seconds() - t0;
      t0 = now_seconds();
      // When both paths run, solve the matrix the update path maintains:
      // the error columns then compare solvers, not assembly orderings.
      // The fresh assembly above still prices global reassembly.
      u_full = full_solve(do_dur ? K : K2, F, chol_full, &rep.full_stats);
      rep.t_solve_full = now_seconds() - t0;
    }
    rep.n_total = map.total;

    if (do_dur) out.vm_dur = nodal_von_mises(as_dur, crack, u_dur);
    if (do_full) out.vm_full = nodal_von_mises(as_full, crack, u_full);
    if (do_dur && do_full) {
      auto [eu, es] = error_metrics(u_dur, u_full, out.vm_dur, out.vm_full);
      rep.e_u = eu;
      rep.e_sigma = es;
    }

    if (write_files) {
      std::vector<char> keep(static_cast<std::size_t>(mesh.elem_count()), 1);
      for (int e = 0; e < mesh.elem_count(); ++e) {
        bool all_in = true;
        for (auto& c : mesh.elem_coords(e))
          if (!phys.in_hole({c[0], c[1]})) all_in = false;
        if (all_in) keep[static_cast<std::size_t>(e)] = 0;
      }
      const std::vector<double>& u = do_dur ? u_dur : u_full;
      const std::vector<double>& vm = do_dur ? out.vm_dur : out.vm_full;
      std::vector<double> ux(mesh.node_count()), uy(mesh.node_count());
      for (int nid = 0; nid < mesh.node_count(); ++nid) {
        ux[static_cast<std::size_t>(nid)] = u[static_cast<std::size_t>(2 * nid)];
        uy[static_cast<std::size_t>(nid)] = u[static_cast<std::size_t>(2 * nid + 1)];
      }
      write_vtk(cfg.out_dir + "/step_" + std::to_string(step) + ".vtk", mesh, ux, uy, vm,
                keep);
    }

    // Stress intensities from the driving solution, then growth.  Both
    // tips see the pre-growth geometry.
    const std::vector<double>& u_drive = do_full ? u_full : u_dur;
    auto tips = crack.tips();
    bool any_active = false;
    rep.tips.resize(tips.size());
    std::vector<double> theta(tips.size(), 0.0);
    for (std::size_t i = 0; i < tips.size(); ++i) {
      rep.tips[i].id = static_cast<int>(i);
      rep.tips[i].active = tips[i].active;
      if (!tips[i].active) continue;
      any_active = true;
      SifResult s = compute_sifs(as_drive, cls, crack, tips[i], u_drive);
      theta[i] = propagation_angle(s.k1, s.k2);
      rep.tips[i].k1 = s.k1;
      rep.tips[i].k2 = s.k2;
      rep.tips[i].theta = theta[i];
    }
    if (any_active)
      for (std::size_t i = 0; i < tips.size(); ++i)
        if (tips[i].active) advance_tip(crack, tips[i].end, theta[i], cfg.da, mesh, phys);

    auto grown = crack.tips();
    for (std::size_t i = 0; i < grown.size(); ++i) {
      rep.tips[i].x = grown[i].pos[0];
      rep.tips[i].y = grown[i].pos[1];
      rep.tips[i].active = grown[i].active;
      path_csv.add_row({CsvTable::num(step), CsvTable::num(static_cast<int>(i)),
                        CsvTable::num(grown[i].pos[0]), CsvTable::num(grown[i].pos[1])});
    }
    if (rep.e_u >= 0.0)
      err_csv.add_row({CsvTable::num(step), CsvTable::num(rep.e_u),
                       CsvTable::num(rep.e_sigma)});
    const SolveStats& lead = do_dur ? rep.dur_stats : rep.full_stats;
    tim_csv.add_row({CsvTable::num(step), CsvTable::num(rep.n_changed),
                     CsvTable::num(rep.n_total), CsvTable::num(rep.eta),
                     CsvTable::num(rep.t_classify), CsvTable::num(rep.t_update_local),
                     CsvTable::num(rep.t_assemble_full), CsvTable::num(rep.t_solve_dur),
                     CsvTable::num(rep.t_solve_full), lead.mode,
                     CsvTable::num(lead.residual)});

    out.steps.push_back(std::move(rep));
    if (!any_active) break;
  }

  out.u_dur = std::move(u_dur);
  out.u_full = std::move(u_full);
  out.path = crack.pts;
  out.n_dofs = map.total;
  if (write_files) {
    path_csv.write(cfg.out_dir + "/path.csv");
    err_csv.write(cfg.out_dir + "/errors.csv");
    tim_csv.write(cfg.out_dir + "/timing.csv");
  }
  return out;
}

}  // namespace durx
