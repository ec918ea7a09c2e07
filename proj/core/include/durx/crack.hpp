#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "durx/mesh.hpp"

namespace durx {

using Vec2 = std::array<double, 2>;

enum class ElemClass : std::uint8_t { standard = 0, split = 1, tip = 2 };

struct CrackTip {
  Vec2 pos{0.0, 0.0};
  double angle = 0.0;  // global direction of growth, radians
  bool active = true;
  int end = 1;  // 0 grows at the front of the polyline, 1 at the back
};

// Open polyline.  An edge crack has its mouth at the front vertex and
// a single growing tip at the back; a center crack grows at both ends.
struct CrackPath {
  std::vector<Vec2> pts;
  bool front_is_tip = false;
  bool front_active = false;
  bool back_active = true;

  // Tip ids are positions in this vector and stay stable across growth
  // steps: a center crack lists the front tip first.
  std::vector<CrackTip> tips() const;

  void extend(int end, Vec2 new_tip);
  void deactivate(int end);
  double length() const;
};

// Side of the crack surface at p: +1 left of the local tangent, -1
// right.  At a kink the point takes the side of whichever adjacent
// segment it is farther off of.  p must not lie on the crack.
double signed_side(const CrackPath& crack, Vec2 p);

struct ElemCut {
  ElemClass cls = ElemClass::standard;
  int tip = -1;             // tip id for tip elements
  std::vector<Vec2> chain;  // crack portion inside the element, in path order
};

struct Classification {
  std::vector<ElemCut> elems;
  std::vector<int> split_elems;
  std::vector<int> tip_elems;
};

// Geometric classification of every element against the crack.  An
// element holding an active tip is a tip element; an element the crack
// passes through with nodes on both sides is split.  Throws if a mesh
// node sits on the crack or the crack re-enters an element it left;
// scenario geometry must keep crack segments off the grid lines.
Classification classify_elements(const QuadMesh& mesh, const CrackPath& crack);

// Polar coordinates (r, theta) in the tip frame; theta is measured
// from the growth direction, positive counterclockwise, in (-pi, pi].
std::array<double, 2> tip_polar(const CrackTip& tip, Vec2 p);

}  // namespace durx
