#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <vector>

#include "durx/sparse.hpp"

using namespace durx;

namespace {

// Random sparse SPD matrix plus its dense mirror, built through the
// public append/add interface.
struct MatPair {
  SparseSpd sp;
  Eigen::MatrixXd dense;
};

MatPair random_spd(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::bernoulli_distribution keep(0.3);

  MatPair m{SparseSpd(0), Eigen::MatrixXd::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    std::vector<int> cols;
    std::vector<double> vals;
    for (int j = 0; j < i; ++j)
      if (keep(rng)) {
        cols.push_back(j);
        vals.push_back(val(rng));
      }
    cols.push_back(i);
    vals.push_back(2.0 * n);  // diagonal dominance keeps it SPD
    for (std::size_t k = 0; k < cols.size(); ++k) {
      m.dense(i, cols[k]) = vals[k];
      m.dense(cols[k], i) = vals[k];
    }
    m.sp.append_row(cols, vals);
  }
  return m;
}

}  // namespace

TEST_CASE("storage mirrors a dense symmetric matrix") {
  MatPair m = random_spd(30, 17);
  CHECK(m.sp.size() == 30);

  for (int i = 0; i < 30; ++i)
    for (int j = 0; j <= i; ++j) CHECK(m.sp.at(i, j) == m.dense(i, j));

  m.sp.add(12, 5, 0.25);
  m.dense(12, 5) += 0.25;
  m.dense(5, 12) += 0.25;
  CHECK(m.sp.at(12, 5) == m.dense(12, 5));
  CHECK_THROWS_AS(m.sp.add(0, 29, 1.0), std::out_of_range);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Eigen::VectorXd x(30);
  for (int i = 0; i < 30; ++i) x(i) = val(rng);
  std::vector<double> xv(x.data(), x.data() + 30);
  std::vector<double> y = m.sp.multiply(xv);
  Eigen::VectorXd want = m.dense * x;
  for (int i = 0; i < 30; ++i) CHECK(y[static_cast<std::size_t>(i)] == doctest::Approx(want(i)).epsilon(1e-14));
}

TEST_CASE("column and coupled_rows read the symmetric matrix") {
  MatPair m = random_spd(30, 99);
  for (int c = 0; c < 30; ++c) {
    auto col = m.sp.column(c);
    int prev = -1;
    Eigen::VectorXd got = Eigen::VectorXd::Zero(30);
    for (auto& [r, v] : col) {
      CHECK(r > prev);
      prev = r;
      got(r) = v;
    }
    for (int r = 0; r < 30; ++r) CHECK(got(r) == m.dense(r, c));

    auto rows = m.sp.coupled_rows(c);
    std::vector<int> want;
    for (int r = 0; r < 30; ++r)
      if (r != c && m.dense(r, c) != 0.0) want.push_back(r);
    // coupled_rows reports stored couplings; stored entries here are
    // exactly the nonzeros, so the two agree.
    CHECK(rows == want);
  }
}

TEST_CASE("mask_dof zeroes a symmetric row and reports changed rows") {
  MatPair m = random_spd(30, 42);
  const int r = 11;

  std::vector<int> want_changed;
  for (int i = 0; i < 30; ++i) {
    if (i == r) {
      want_changed.push_back(i);
      continue;
    }
    // Masking touches stored entries only: row r of the lower triangle
    // and the mirror entries below the diagonal.
    if (i > r && m.sp.at(i, r) != 0.0) want_changed.push_back(i);
  }

  std::vector<int> changed = m.sp.mask_dof(r);
  CHECK(changed == want_changed);

  m.dense.row(r).setZero();
  m.dense.col(r).setZero();
  m.dense(r, r) = 1.0;
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j <= i; ++j) CHECK(m.sp.at(i, j) == m.dense(i, j));
}

TEST_CASE("append_row rejects malformed input") {
  SparseSpd a(0);
  a.append_row({0}, {1.0});
  CHECK_THROWS_AS(a.append_row({1, 0}, {1.0, 1.0}), std::invalid_argument);   // unsorted
  CHECK_THROWS_AS(a.append_row({2}, {1.0}), std::invalid_argument);           // col > row
  CHECK_THROWS_AS(a.append_row({0, 1}, {1.0}), std::invalid_argument);        // size mismatch
}

TEST_CASE("first_nonzero_col skips stored zeros") {
  SparseSpd a(0);
  a.append_row({0}, {2.0});
  a.append_row({1}, {3.0});
  a.append_row({2}, {4.0});
  a.append_row({3}, {5.0});
  a.append_row({4}, {6.0});
  a.append_row({1, 3, 5}, {0.0, 2.0, 4.0});
  CHECK(a.first_nonzero_col(5) == 3);
  CHECK(a.first_nonzero_col(0) == 0);

  a.append_row({6}, {0.0});
  CHECK(a.first_nonzero_col(6) == 6);

  // nnz counts stored entries, stored zeros included.
  CHECK(a.nnz() == 9);
}
