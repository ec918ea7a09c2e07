#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "durx/crack.hpp"
#include "durx/enrichment.hpp"
#include "durx/mesh.hpp"
#include "durx/sparse.hpp"

namespace durx {

struct Material {
  double e = 0.0;   // MPa
  double nu = 0.0;  // plane strain throughout
};

struct Inclusion {
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
  Material mat;
};

struct Hole {
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
};

struct Physics {
  Material base;
  std::vector<Inclusion> inclusions;
  std::vector<Hole> holes;

  bool in_hole(Vec2 p) const;
  const Material& mat_at(Vec2 p) const;
};

enum class ItemKind : std::uint8_t { standard, heaviside, tip };

// One scalar basis function of one element: a shape function times 1,
// a shifted step, or a shifted branch function, acting on component
// comp.  shift holds the nodal value subtracted off; tip items carry
// the frozen frame their stiffness entries were integrated with.
struct DofItem {
  int dof = -1;
  int node = -1;
  int comp = 0;
  ItemKind kind = ItemKind::standard;
  int branch = 0;
  double shift = 0.0;
  CrackTip frame;
};

bool operator==(const DofItem& a, const DofItem& b);

struct ElemRecord {
  ElemClass cls = ElemClass::standard;
  std::vector<DofItem> items;  // ascending dof
  std::vector<double> pairs;   // packed lower: idx(i,j) = i*(i+1)/2 + j
};

struct DeltaResult {
  std::vector<int> appended;       // dof rows added this step
  std::vector<int> masked;         // dofs masked this step
  std::vector<int> value_changed;  // surviving rows with re-summed entries
  std::vector<int> changed_rows;   // every row of |K - K_prev| with a nonzero
};

// Integrates element stiffness and maintains the global matrix across
// propagation steps.  Elements reintegrate only when their item set or
// class changes, and pairs whose items both survive are copied from
// the previous record: entries outside the changed set stay
// bit-identical, and the standard block never changes at all.
class Assembler {
 public:
  Assembler(const QuadMesh& mesh, Physics phys);

  SparseSpd assemble(const DofMap& map, const Classification& cls,
                     const CrackPath& crack);

  DeltaResult delta_update(SparseSpd& K, const DofMap& map, const Classification& cls,
                           const CrackPath& crack, const DofUpdate& upd);

  // Standard dofs of nodes every element of which lies inside a hole.
  std::vector<int> voided_dofs() const;

  const ElemRecord& record(int e) const { return records_[static_cast<std::size_t>(e)]; }
  const Physics& physics() const { return phys_; }
  const QuadMesh& mesh() const { return mesh_; }

  struct ItemEval {
    double f = 0.0, fx = 0.0, fy = 0.0;
  };

  // Scalar basis value and gradient of each item at a physical point
  // of element e.  Step sides are taken against the supplied crack.
  void eval_items(const std::vector<DofItem>& items, const CrackPath& crack, int e,
                  Vec2 p, std::vector<ItemEval>& out) const;

  // Quadrature placement honoring the element's cut geometry; weights
  // are physical areas.  Points inside holes are not filtered here.
  struct IntegrationPoint {
    Vec2 x{0.0, 0.0};
    double w = 0.0;
  };
  std::vector<IntegrationPoint> integration_points(int e, const ElemCut& cut,
                                                   bool fine) const;

  // Displacement and gradient [du/dx du/dy dv/dx dv/dy] at a physical
  // point from the current record of element e.
  struct FieldSample {
    Vec2 u{0.0, 0.0};
    std::array<double, 4> grad{0.0, 0.0, 0.0, 0.0};
  };
  FieldSample sample(int e, Vec2 p, const CrackPath& crack,
                     const std::vector<double>& u) const;

 private:
  std::vector<DofItem> build_items(int e, const DofMap& map, const Classification& cls) const;
  void integrate(int e, const ElemCut& cut, const std::vector<DofItem>& items,
                 const CrackPath& crack, std::vector<double>& pairs) const;

  const QuadMesh& mesh_;
  Physics phys_;
  std::vector<ElemRecord> records_;
  std::vector<char> fully_void_;
};

// Nodal force at the node nearest pos; shifted enrichment vanishes at
// nodes, so only standard dofs load.
void add_point_load(const QuadMesh& mesh, Vec2 pos, Vec2 force, std::vector<double>& f);

// Constant traction (N/mm) on one domain edge, integrated into nodal
// forces.  Throws if a loaded element carries enrichment, which would
// need consistent enriched load terms.
void add_edge_traction(const QuadMesh& mesh, char edge, Vec2 traction,
                       const Classification& cls, const DofMap& map,
                       std::vector<double>& f);

}  // namespace durx
