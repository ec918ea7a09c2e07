#pragma once

#include <Eigen/Dense>
#include <cstdlib>
#include <string>

#include "durx/assembly.hpp"
#include "durx/crack.hpp"

namespace durx::test {

// Directory with the bundled .scenario files; ctest points this at the
// source tree so the binary can run from anywhere.
inline std::string scenario_dir() {
  const char* env = std::getenv("DURX_SCENARIO_DIR");
  return env != nullptr ? env : "scenarios";
}

inline Eigen::MatrixXd unpack(const ElemRecord& rec) {
  const int n = static_cast<int>(rec.items.size());
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = rec.pairs[static_cast<std::size_t>(i) * (static_cast<std::size_t>(i) + 1) / 2 +
                           static_cast<std::size_t>(j)];
      K(i, j) = v;
      K(j, i) = v;
    }
  return K;
}

// Crack that touches nothing: far away and inactive, for assembling
// uncracked plates through the same code path as cracked ones.
inline CrackPath remote_crack() {
  CrackPath c;
  c.pts = {{1.0e4, 1.0e4 + 0.5}, {1.0e4 + 1.0, 1.0e4 + 0.5}};
  c.back_active = false;
  return c;
}

}  // namespace durx::test
