#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "durx/assembly.hpp"
#include "durx/crack.hpp"
#include "durx/scenario.hpp"
#include "durx/solver.hpp"

namespace durx {

struct TipReport {
  int id = 0;
  double x = 0.0, y = 0.0;  // position after this step's growth
  double k1 = 0.0, k2 = 0.0, theta = 0.0;
  bool active = false;
};

struct StepReport {
  int step = 0;  // 1-based; each step solves, then grows
  std::vector<TipReport> tips;
  int n_changed = 0;  // cumulative since the last rebase
  int n_total = 0;
  double eta = 0.0;  // percent
  double t_classify = 0.0;
  double t_update_local = 0.0;   // delta stiffness update
  double t_assemble_full = 0.0;  // from-scratch reassembly
  double t_solve_dur = 0.0;
  double t_solve_full = 0.0;
  double e_u = -1.0;      // percent, -1 outside both mode
  double e_sigma = -1.0;  // percent
  SolveStats dur_stats, full_stats;
};

struct RunResult {
  std::vector<StepReport> steps;
  std::vector<double> u_dur, u_full;    // final-step solutions
  std::vector<double> vm_dur, vm_full;  // final-step nodal Von Mises
  std::vector<Vec2> path;               // final crack polyline
  int n_dofs = 0;
  // Factor work spent inside the standard dof block, before and after
  // the propagation steps; equal values mean the reused leading block
  // was never refactored.
  std::uint64_t leading_flops_after_baseline = 0;
  std::uint64_t leading_flops_final = 0;
};

// Percent L2 error pair (displacement, Von Mises) of a test field
// against a reference field.  Throws when a reference norm vanishes.
std::pair<double, double> error_metrics(const std::vector<double>& u_test,
                                        const std::vector<double>& u_ref,
                                        const std::vector<double>& vm_test,
                                        const std::vector<double>& vm_ref);

// Von Mises stress sampled at interior Gauss points, extrapolated to
// the element corners bilinearly and averaged over elements at each
// node.  Elements inside holes contribute nothing.
std::vector<double> nodal_von_mises(const Assembler& as, const CrackPath& crack,
                                    const std::vector<double>& u);

// Standard dofs pinned by the fixed edges plus dofs of fully voided
// nodes; these rows are masked before the first factorization.
std::vector<int> boundary_masked_dofs(const RunConfig& cfg, const Assembler& as,
                                      const DofMap& map);

// Consistent load vector for the scenario's point and edge loads.
std::vector<double> build_loads(const RunConfig& cfg, const QuadMesh& mesh,
                                const Classification& cls, const DofMap& map);

// Quasi-static propagation run.  Mode full re-assembles and factors
// each step; mode dur updates locally and reuses the first factor;
// mode both runs the two side by side on the geometry sequence driven
// by the full solution and records the error metrics between them.
// With write_files the out directory receives path.csv, errors.csv,
// timing.csv and step_<k>.vtk snapshots.
RunResult run(const RunConfig& cfg, bool write_files);

struct ScalePoint {
  int target = 0;  // requested dof count
  int dofs = 0;    // achieved dof count
  double solve_full_s = 0.0;
  double solve_dur_s = 0.0;
  double update_global_s = 0.0;
  double update_local_s = 0.0;
};

// Per-phase wall time at each dof target, from a short propagation run
// at a resolution scaled to the target.  Median of three repeats, and
// the first growth step is warm-up that never enters the statistics.
std::vector<ScalePoint> benchmark_scaling(const RunConfig& base,
                                          const std::vector<int>& targets);

// Resolution-scaled copy of a scenario aiming at the target dof count;
// the crack stays on half-cell lines and the increment above the
// element diagonal.
RunConfig scale_to_dofs(const RunConfig& base, int target);

}  // namespace durx
