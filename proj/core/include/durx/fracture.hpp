#pragma once

#include <string>
#include <vector>

#include "durx/assembly.hpp"
#include "durx/crack.hpp"

namespace durx {

struct SifResult {
  double k1 = 0.0;  // opening mode, MPa sqrt(mm)
  double k2 = 0.0;  // sliding mode
  double r_domain = 0.0;
  std::string warning;
};

// Stress intensity factors at one tip from the domain form of the
// interaction integral with a radial plateau weight (1 inside half the
// domain radius, linear to 0 at the rim).  The domain shrinks away
// from holes, inclusion interfaces and the outer boundary so the
// extraction sees homogeneous material; it warns when squeezed under
// two element sizes.
SifResult compute_sifs(const Assembler& as, const Classification& cls,
                       const CrackPath& crack, const CrackTip& tip,
                       const std::vector<double>& u, double rd_elems = 3.0);

// Kink angle of maximum hoop stress, in the tip frame.  Pure sliding
// gives -+70.5 degrees for +-k2; pure opening gives zero.
double propagation_angle(double k1, double k2);

struct AdvanceOutcome {
  bool deactivated = false;
  std::string reason;  // "boundary" or "hole" when deactivated
};

// Grows the tip at the given end by da along theta in the tip frame,
// nudging the new vertex off grid lines.  A vertex landing outside the
// domain or inside a hole still extends the path (so the elements on
// the way split) but retires the tip.
AdvanceOutcome advance_tip(CrackPath& crack, int end, double theta, double da,
                           const QuadMesh& mesh, const Physics& phys);

}  // namespace durx
