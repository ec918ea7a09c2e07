#include <doctest.h>

#include "durx/mesh.hpp"

TEST_CASE("mesh node count") {
  durx::QuadMesh m = durx::build_mesh(60.0, 120.0, 30, 60);
  CHECK(m.nodes.size() == 31u * 61u);
}
