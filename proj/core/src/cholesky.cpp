#include "durx/cholesky.hpp"

#include <algorithm>
#include <cmath>

namespace durx {

void EnvelopeCholesky::refactor(const SparseSpd& K, int p) {
  const int n = K.size();
  if (p < 0 || p > static_cast<int>(rows_.size()))
    throw std::invalid_argument("refactor: start row out of range");
  rows_.resize(static_cast<std::size_t>(n));
  first_.resize(static_cast<std::size_t>(n));
  last_start_ = p;

  std::vector<double> work;
  for (int i = p; i < n; ++i) {
    int fi = std::min(K.first_nonzero_col(i), i);
    first_[static_cast<std::size_t>(i)] = fi;
    work.assign(static_cast<std::size_t>(i - fi + 1), 0.0);
    const auto& kc = K.row_cols(i);
    const auto& kv = K.row_vals(i);
    for (std::size_t k = 0; k < kc.size(); ++k)
      if (kc[k] >= fi) work[static_cast<std::size_t>(kc[k] - fi)] = kv[k];

    std::uint64_t fl = 0;
    for (int j = fi; j < i; ++j) {
      const auto& lj = rows_[static_cast<std::size_t>(j)];
      int fj = first_[static_cast<std::size_t>(j)];
      int k0 = std::max(fi, fj);
      double s = 0.0;
      const double* a = work.data() + (k0 - fi);
      const double* b = lj.data() + (k0 - fj);
      for (int k = 0; k < j - k0; ++k) s += a[k] * b[k];
      work[static_cast<std::size_t>(j - fi)] = (work[static_cast<std::size_t>(j - fi)] - s) / lj.back();
      fl += 2 * static_cast<std::uint64_t>(j - k0) + 2;
    }
    double d = work.back();
    for (int k = 0; k < i - fi; ++k) d -= work[static_cast<std::size_t>(k)] * work[static_cast<std::size_t>(k)];
    fl += 2 * static_cast<std::uint64_t>(i - fi) + 1;
    if (!(d > 0.0)) throw NotSpdError(i, d);
    work.back() = std::sqrt(d);
    rows_[static_cast<std::size_t>(i)] = work;
    factor_flops_ += fl;
    if (i < marker_) leading_flops_ += fl;
  }
}

void EnvelopeCholesky::solve(std::vector<double>& x) const {
  solve_restricted(x, 0);
}

void EnvelopeCholesky::solve_restricted(std::vector<double>& x, int bwd_stop) const {
  const int n = size();
  int start = 0;
  while (start < n && x[static_cast<std::size_t>(start)] == 0.0) ++start;
  std::uint64_t fl = 0;
  for (int i = start; i < n; ++i) {
    const auto& li = rows_[static_cast<std::size_t>(i)];
    int fi = first_[static_cast<std::size_t>(i)];
    int k0 = std::max(fi, start);
    double s = x[static_cast<std::size_t>(i)];
    const double* b = x.data() + k0;
    const double* a = li.data() + (k0 - fi);
    for (int k = 0; k < i - k0; ++k) s -= a[k] * b[k];
    x[static_cast<std::size_t>(i)] = s / li.back();
    fl += 2 * static_cast<std::uint64_t>(i - k0);
  }
  for (int i = n - 1; i >= bwd_stop; --i) {
    const auto& li = rows_[static_cast<std::size_t>(i)];
    int fi = first_[static_cast<std::size_t>(i)];
    double xi = x[static_cast<std::size_t>(i)] / li.back();
    x[static_cast<std::size_t>(i)] = xi;
    if (xi != 0.0) {
      double* b = x.data() + fi;
      for (int k = 0; k < i - fi; ++k) b[k] -= li[static_cast<std::size_t>(k)] * xi;
      fl += 2 * static_cast<std::uint64_t>(i - fi);
    }
  }
  solve_flops_ += fl;
}

std::vector<double> EnvelopeCholesky::multiply(const std::vector<double>& x) const {
  const int n = size();
  std::vector<double> t(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    const auto& lk = rows_[static_cast<std::size_t>(k)];
    int fk = first_[static_cast<std::size_t>(k)];
    const double xk = x[static_cast<std::size_t>(k)];
    if (xk == 0.0) continue;
    for (int j = fk; j <= k; ++j) t[static_cast<std::size_t>(j)] += lk[static_cast<std::size_t>(j - fk)] * xk;
  }
  std::vector<double> y(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& li = rows_[static_cast<std::size_t>(i)];
    int fi = first_[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (int j = fi; j <= i; ++j) s += li[static_cast<std::size_t>(j - fi)] * t[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

void EnvelopeCholesky::solve_panel(std::vector<std::vector<double>>& xs, int bwd_stop) const {
  const int n = size();
  const std::size_t m = xs.size();
  if (m == 0) return;
  int start = n;
  for (const auto& x : xs)
    for (int i = 0; i < start; ++i)
      if (x[static_cast<std::size_t>(i)] != 0.0) {
        start = i;
        break;
      }
  std::uint64_t fl = 0;
  for (int i = start; i < n; ++i) {
    const auto& li = rows_[static_cast<std::size_t>(i)];
    int fi = first_[static_cast<std::size_t>(i)];
    int k0 = std::max(fi, start);
    const double* a = li.data() + (k0 - fi);
    const double inv = 1.0 / li.back();
    for (auto& x : xs) {
      double s = x[static_cast<std::size_t>(i)];
      const double* b = x.data() + k0;
      for (int k = 0; k < i - k0; ++k) s -= a[k] * b[k];
      x[static_cast<std::size_t>(i)] = s * inv;
    }
    fl += 2 * static_cast<std::uint64_t>(i - k0) * m;
  }
  for (int i = n - 1; i >= bwd_stop; --i) {
    const auto& li = rows_[static_cast<std::size_t>(i)];
    int fi = first_[static_cast<std::size_t>(i)];
    const double inv = 1.0 / li.back();
    for (auto& x : xs) {
      double xi = x[static_cast<std::size_t>(i)] * inv;
      x[static_cast<std::size_t>(i)] = xi;
      if (xi == 0.0) continue;
      double* b = x.data() + fi;
      for (int k = 0; k < i - fi; ++k) b[k] -= li[static_cast<std::size_t>(k)] * xi;
      fl += 2 * static_cast<std::uint64_t>(i - fi);
    }
  }
  solve_flops_ += fl;
}

}  // namespace durx
