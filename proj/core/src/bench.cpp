#include <algorithm>
#include <array>
#include <cmath>

#include "durx/sim.hpp"

namespace durx {

RunConfig scale_to_dofs(const RunConfig& base, int target) {
  RunConfig cfg = base;
  const double n_base = 2.0 * (base.nx + 1) * (base.ny + 1);
  const double s = std::sqrt(target / n_base);
  cfg.nx = std::max(2, static_cast<int>(std::lround(base.nx * s)));
  cfg.ny = std::max(2, static_cast<int>(std::lround(base.ny * s)));
  const double dx = cfg.width / cfg.nx, dy = cfg.height / cfg.ny;

  // Interior crack coordinates move to half-cell lines so vertices
  // never sit on the grid; boundary mouths stay on the boundary.
  auto snap = [](double v, double d, double lim) {
    if (v <= 0.0 || v >= lim) return v;
    return (std::floor(v / d) + 0.5) * d;
  };
  for (auto& p : cfg.crack_points) {
    p[0] = snap(p[0], dx, cfg.width);
    p[1] = snap(p[1], dy, cfg.height);
  }
  cfg.da = 1.6 * std::hypot(dx, dy);
  return cfg;
}

std::vector<ScalePoint> benchmark_scaling(const RunConfig& base,
                                          const std::vector<int>& targets) {
  std::vector<ScalePoint> out;
  for (int target : targets) {
    RunConfig cfg = scale_to_dofs(base, target);
    cfg.mode = "both";
    cfg.max_steps = 4;  // baseline, warm-up, two measured growth steps

    ScalePoint pt;
    pt.target = target;
    std::array<std::array<double, 3>, 4> phase{};  // per phase, per repeat
    for (int rep = 0; rep < 3; ++rep) {
      RunResult r = run(cfg, false);
      pt.dofs = r.n_dofs;
      if (r.steps.size() < 3)
        throw std::runtime_error("benchmark_scaling: run ended before a measured step");
      double acc[4] = {0, 0, 0, 0};
      int n = 0;
      // Step 1 is the baseline factorization and step 2 warms caches;
      // neither represents steady-state propagation cost.
      for (std::size_t k = 2; k < r.steps.size(); ++k) {
        const StepReport& sr = r.steps[k];
        acc[0] += sr.t_solve_full;
        acc[1] += sr.t_solve_dur;
        acc[2] += sr.t_assemble_full;
        acc[3] += sr.t_update_local;
        ++n;
      }
      for (int p = 0; p < 4; ++p) phase[static_cast<std::size_t>(p)][static_cast<std::size_t>(rep)] = acc[p] / n;
    }
    auto median3 = [](std::array<double, 3> v) {
      std::sort(v.begin(), v.end());
      return v[1];
    };
    pt.solve_full_s = median3(phase[0]);
    pt.solve_dur_s = median3(phase[1]);
    pt.update_global_s = median3(phase[2]);
    pt.update_local_s = median3(phase[3]);
    out.push_back(pt);
  }
  return out;
}

}  // namespace durx
