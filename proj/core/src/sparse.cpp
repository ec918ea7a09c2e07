#include "durx/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace durx {

SparseSpd::SparseSpd(int n) : n_(0) {
  if (n < 0) throw std::invalid_argument("SparseSpd: negative size");
  cols_.reserve(static_cast<std::size_t>(n));
  vals_.reserve(static_cast<std::size_t>(n));
  occ_.reserve(static_cast<std::size_t>(n));
}

std::size_t SparseSpd::nnz() const {
  std::size_t t = 0;
  for (const auto& r : cols_) t += r.size();
  return t;
}

void SparseSpd::append_row(std::vector<int> cols, std::vector<double> vals) {
  if (cols.size() != vals.size())
    throw std::invalid_argument("append_row: column/value size mismatch");
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] > n_ || (k > 0 && cols[k] <= cols[k - 1]))
      throw std::invalid_argument("append_row: columns must be sorted, unique, <= row");
  }
  for (int c : cols)
    if (c < n_) occ_[static_cast<std::size_t>(c)].push_back(n_);
  cols_.push_back(std::move(cols));
  vals_.push_back(std::move(vals));
  occ_.emplace_back();
  ++n_;
}

namespace {

int find_col(const std::vector<int>& cols, int j) {
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return -1;
  return static_cast<int>(it - cols.begin());
}

}  // namespace

void SparseSpd::add(int i, int j, double v) {
  int k = find_col(cols_[static_cast<std::size_t>(i)], j);
  if (k < 0) throw std::out_of_range("SparseSpd::add: entry not in pattern");
  vals_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] += v;
}

double SparseSpd::at(int i, int j) const {
  if (i < j) std::swap(i, j);
  int k = find_col(cols_[static_cast<std::size_t>(i)], j);
  return k < 0 ? 0.0 : vals_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
}

std::vector<int> SparseSpd::mask_dof(int r) {
  std::vector<int> changed;
  auto& rc = cols_[static_cast<std::size_t>(r)];
  auto& rv = vals_[static_cast<std::size_t>(r)];
  bool row_changed = false;
  for (std::size_t k = 0; k < rc.size(); ++k) {
    double want = (rc[k] == r) ? 1.0 : 0.0;
    if (rv[k] != want) {
      rv[k] = want;
      row_changed = true;
    }
  }
  if (find_col(rc, r) < 0) throw std::logic_error("mask_dof: missing diagonal");
  if (row_changed) changed.push_back(r);
  for (int s : occ_[static_cast<std::size_t>(r)]) {
    int k = find_col(cols_[static_cast<std::size_t>(s)], r);
    auto& v = vals_[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
    if (v != 0.0) {
      v = 0.0;
      changed.push_back(s);
    }
  }
  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
  return changed;
}

std::vector<int> SparseSpd::coupled_rows(int r) const {
  std::vector<int> out;
  for (std::size_t k = 0; k < cols_[static_cast<std::size_t>(r)].size(); ++k)
    if (vals_[static_cast<std::size_t>(r)][k] != 0.0 && cols_[static_cast<std::size_t>(r)][k] != r)
      out.push_back(cols_[static_cast<std::size_t>(r)][k]);
  for (int s : occ_[static_cast<std::size_t>(r)]) {
    int k = find_col(cols_[static_cast<std::size_t>(s)], r);
    if (vals_[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)] != 0.0) out.push_back(s);
  }
  return out;  // both halves already ascending, occ rows all > r
}

std::vector<std::pair<int, double>> SparseSpd::column(int c) const {
  std::vector<std::pair<int, double>> out;
  const auto& cc = cols_[static_cast<std::size_t>(c)];
  const auto& cv = vals_[static_cast<std::size_t>(c)];
  for (std::size_t k = 0; k < cc.size(); ++k)
    if (cv[k] != 0.0) out.emplace_back(cc[k], cv[k]);
  for (int s : occ_[static_cast<std::size_t>(c)]) {
    int k = find_col(cols_[static_cast<std::size_t>(s)], c);
    double v = vals_[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
    if (v != 0.0) out.emplace_back(s, v);
  }
  return out;
}

std::vector<double> SparseSpd::multiply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("multiply: size mismatch");
  std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    const auto& rc = cols_[static_cast<std::size_t>(i)];
    const auto& rv = vals_[static_cast<std::size_t>(i)];
    double yi = 0.0;
    for (std::size_t k = 0; k < rc.size(); ++k) {
      int j = rc[k];
      double v = rv[k];
      yi += v * x[static_cast<std::size_t>(j)];
      if (j != i) y[static_cast<std::size_t>(j)] += v * x[static_cast<std::size_t>(i)];
    }
    y[static_cast<std::size_t>(i)] += yi;
  }
  return y;
}

int SparseSpd::first_nonzero_col(int i) const {
  const auto& rc = cols_[static_cast<std::size_t>(i)];
  const auto& rv = vals_[static_cast<std::size_t>(i)];
  for (std::size_t k = 0; k < rc.size(); ++k)
    if (rv[k] != 0.0) return rc[k];
  return i;
}

}  // namespace durx
