#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "durx/crack.hpp"
#include "durx/mesh.hpp"

namespace durx {

// Shifted step enrichment: vanishes at the owning node, +-2 across the
// crack from it.  side values are +-1 from signed_side.
inline double heaviside_shifted(double side_at_point, double side_at_node) {
  return side_at_point - side_at_node;
}

// Near-tip basis sqrt(r) * {sin t/2, cos t/2, sin t sin t/2, sin t cos t/2}
// with global Cartesian derivatives.  Unbounded gradient at r = 0, so
// callers must keep quadrature points off the tip.
struct BranchEval {
  std::array<double, 4> f;
  std::array<double, 4> dx;
  std::array<double, 4> dy;
};

BranchEval branch_functions(const CrackTip& tip, Vec2 p);

enum class EnrichKind : std::uint8_t { heaviside, tip };

// One enrichment attached to one node.  Records are append-only; a
// record that stops being needed is retired, never removed, so global
// dof ids are stable for the whole simulation.  Tip records freeze the
// tip frame they were created under: reintegrated elements keep seeing
// the frame their cached stiffness entries were computed with.
struct Enrichment {
  EnrichKind kind = EnrichKind::heaviside;
  int node = -1;
  int dof_base = -1;
  bool active = true;
  double side_at_node = 0.0;  // heaviside only
  int tip = -1;               // tip records only
  CrackTip frame;             // frozen at creation

  int n_dofs() const { return kind == EnrichKind::heaviside ? 2 : 8; }
};

struct DofMap {
  int n_nodes = 0;
  int total = 0;  // matrix dimension; standard dofs occupy [0, 2*n_nodes)
  std::vector<Enrichment> enrichments;
  std::vector<std::vector<int>> node_enr;  // node -> enrichment record ids
  std::vector<char> retired;               // per dof, 1 once masked out

  static DofMap create(int n_nodes);

  int std_dof(int node, int comp) const { return 2 * node + comp; }
  int active_count() const;
};

struct DofUpdate {
  std::vector<int> new_dofs;      // ascending
  std::vector<int> retired_dofs;  // ascending
  std::vector<int> new_enr;
  std::vector<int> retired_enr;
};

// Reconciles the dof map with the current classification.  Nodes of an
// active tip element carry a tip record bound to the current tip frame;
// when the tip moves, the whole block of stale tip dofs retires and a
// fresh block is appended.  Nodes of split elements outside any tip
// element gain a step record once and keep it for good.
DofUpdate update_dof_map(DofMap& map, const QuadMesh& mesh,
                         const Classification& cls, const CrackPath& crack);

}  // namespace durx
