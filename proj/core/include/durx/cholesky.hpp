#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "durx/sparse.hpp"

namespace durx {

struct NotSpdError : std::runtime_error {
  int row;
  explicit NotSpdError(int r, double pivot)
      : std::runtime_error("matrix not positive definite at row " + std::to_string(r) +
                           " (pivot " + std::to_string(pivot) + ")"),
        row(r) {}
};

// Profile (envelope) Cholesky K = L L^T.  Row i of L is dense on
// [first_i, i] where first_i is the first nonzero column of K's row i;
// fill never extends left of that, so the profile is exact.  Because
// dofs are never renumbered, appending dofs appends rows, and a change
// confined to rows >= p lets refactor_from(p) keep every row below p.
class EnvelopeCholesky {
 public:
  void factor(const SparseSpd& K) { refactor(K, 0); }

  // Recomputes rows >= p against K, keeping rows < p from the previous
  // call.  Valid only when no K row below p changed since then.
  void refactor(const SparseSpd& K, int p);

  int size() const { return static_cast<int>(rows_.size()); }

  // In-place solve of L L^T x = b.
  void solve(std::vector<double>& x) const;

  // Forward sweep skips rows below the first nonzero of x; backward
  // sweep finalizes rows >= bwd_stop and leaves the rest unusable.
  void solve_restricted(std::vector<double>& x, int bwd_stop) const;

  // Same restricted solve over a panel of right-hand sides, sweeping
  // each L row once for all of them.
  void solve_panel(std::vector<std::vector<double>>& xs, int bwd_stop) const;

  // y = L (L^T x), for factor accuracy checks.
  std::vector<double> multiply(const std::vector<double>& x) const;

  // Rows < marker count toward leading_flops(); the leading block of a
  // propagation run must never be refactored.
  void set_leading_marker(int marker) { marker_ = marker; }

  std::uint64_t factor_flops() const { return factor_flops_; }
  std::uint64_t leading_flops() const { return leading_flops_; }
  std::uint64_t solve_flops() const { return solve_flops_; }
  int last_start_row() const { return last_start_; }

 private:
  std::vector<std::vector<double>> rows_;  // packed [first_i, i]
  std::vector<int> first_;
  int marker_ = 0;
  int last_start_ = 0;
  std::uint64_t factor_flops_ = 0;
  std::uint64_t leading_flops_ = 0;
  mutable std::uint64_t solve_flops_ = 0;
};

}  // namespace durx
