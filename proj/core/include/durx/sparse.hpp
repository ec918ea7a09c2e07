#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace durx {

// Symmetric positive-definite sparse matrix, lower triangle stored by
// rows: row i holds sorted columns j <= i.  Read column-wise this is
// the upper triangle by columns, so appending a dof appends storage
// and never touches existing rows.  Per-column occurrence lists locate
// the below-diagonal mirror entries for masking and column extraction.
class SparseSpd {
 public:
  explicit SparseSpd(int n = 0);

  int size() const { return n_; }
  std::size_t nnz() const;

  // Appends row n with the given sorted unique columns (all <= n).
  void append_row(std::vector<int> cols, std::vector<double> vals);

  // Accumulates into an existing entry; i >= j required.
  void add(int i, int j, double v);
  double at(int i, int j) const;  // 0 when the entry is not stored

  // Masks dof r out of the system: zeroes its row and every mirrored
  // entry, puts 1 on the diagonal.  Returns the storage rows whose
  // values changed, r included, ascending.
  std::vector<int> mask_dof(int r);

  // Rows of the symmetric matrix holding a nonzero in column r
  // (either triangle), r excluded, ascending.
  std::vector<int> coupled_rows(int r) const;

  // Full symmetric column c as (row, value), ascending, zeros skipped.
  std::vector<std::pair<int, double>> column(int c) const;

  std::vector<double> multiply(const std::vector<double>& x) const;

  const std::vector<int>& row_cols(int i) const { return cols_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& row_vals(int i) const { return vals_[static_cast<std::size_t>(i)]; }

  // First column of row i holding a nonzero value; i when the row is
  // empty or all zero.  This is the envelope start for factorization.
  int first_nonzero_col(int i) const;

 private:
  int n_ = 0;
  std::vector<std::vector<int>> cols_;
  std::vector<std::vector<double>> vals_;
  std::vector<std::vector<int>> occ_;  // col -> rows > col storing it
};

}  // namespace durx
