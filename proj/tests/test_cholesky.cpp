#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "durx/cholesky.hpp"
#include "durx/sparse.hpp"

using namespace durx;

namespace {

// Dense SPD matrix pushed through the sparse interface, fully stored.
SparseSpd from_dense(const Eigen::MatrixXd& A) {
  SparseSpd K(0);
  for (int i = 0; i < A.rows(); ++i) {
    std::vector<int> cols;
    std::vector<double> vals;
    for (int j = 0; j <= i; ++j) {
      cols.push_back(j);
      vals.push_back(A(i, j));
    }
    K.append_row(cols, vals);
  }
  return K;
}

Eigen::MatrixXd random_spd_dense(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = g(rng);
  return B.transpose() * B + Eigen::MatrixXd::Identity(n, n);
}

double factor_error(const EnvelopeCholesky& chol, const SparseSpd& K) {
  const int n = K.size();
  double num = 0.0, den = 0.0;
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  for (int c = 0; c < n; ++c) {
    e[static_cast<std::size_t>(c)] = 1.0;
    std::vector<double> llt = chol.multiply(e);
    std::vector<double> kc = K.multiply(e);
    e[static_cast<std::size_t>(c)] = 0.0;
    for (int r = 0; r < n; ++r) {
      double d = llt[static_cast<std::size_t>(r)] - kc[static_cast<std::size_t>(r)];
      num += d * d;
      den += kc[static_cast<std::size_t>(r)] * kc[static_cast<std::size_t>(r)];
    }
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("identity and a 2x2 with exact binary entries") {
  SparseSpd I(0);
  for (int i = 0; i < 5; ++i) {
    std::vector<int> c{i};
    std::vector<double> v{1.0};
    I.append_row(c, v);
  }
  EnvelopeCholesky chol;
  chol.factor(I);
  std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> b = x;
  chol.solve(b);
  CHECK(b == x);

  // [[4,2],[2,5]]: L = [[2,0],[1,2]], every intermediate exact in
  // binary floating point, so results must be bitwise exact.
  SparseSpd K(0);
  K.append_row({0}, {4.0});
  K.append_row({0, 1}, {2.0, 5.0});
  EnvelopeCholesky c2;
  c2.factor(K);

  std::vector<double> e0{1.0, 0.0};
  std::vector<double> y = c2.multiply(e0);
  CHECK(y[0] == 4.0);
  CHECK(y[1] == 2.0);

  std::vector<double> rhs{6.0, 7.0};  // solution (1, 1)
  c2.solve(rhs);
  CHECK(rhs[0] == 1.0);
  CHECK(rhs[1] == 1.0);
}

TEST_CASE("factor and solve match a dense reference") {
  const int n = 50;
  Eigen::MatrixXd A = random_spd_dense(n, 5);
  SparseSpd K = from_dense(A);

  EnvelopeCholesky chol;
  chol.factor(K);
  CHECK(chol.size() == n);
  CHECK(factor_error(chol, K) < 1e-12);

  std::mt19937 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = g(rng);

  Eigen::VectorXd want = A.llt().solve(b);
  std::vector<double> x(b.data(), b.data() + n);
  chol.solve(x);
  for (int i = 0; i < n; ++i)
    CHECK(x[static_cast<std::size_t>(i)] == doctest::Approx(want(i)).epsilon(1e-10));

  // Round trip: b = K x recovers x.
  std::vector<double> x0(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x0[static_cast<std::size_t>(i)] = g(rng);
  std::vector<double> rt = K.multiply(x0);
  chol.solve(rt);
  for (int i = 0; i < n; ++i)
    CHECK(rt[static_cast<std::size_t>(i)] ==
          doctest::Approx(x0[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("refactor from a row reproduces the fresh factorization") {
  const int n = 20, p = 12;
  Eigen::MatrixXd A = random_spd_dense(n, 11);
  SparseSpd K = from_dense(A);

  EnvelopeCholesky inc;
  inc.factor(K);

  // Perturb rows >= p only (symmetric mirrors land in columns >= p of
  // the lower triangle rows, which are the same stored rows).  The
  // perturbation norm stays well under lambda_min(A) = 1.
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (int i = p; i < n; ++i)
    for (int j = 0; j <= i; ++j) K.add(i, j, u(rng));

  inc.refactor(K, p);
  CHECK(inc.last_start_row() == p);

  EnvelopeCholesky fresh;
  fresh.factor(K);

  // Identical arithmetic on identical inputs: solves agree bitwise.
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> b(static_cast<std::size_t>(n));
    for (auto& v : b) v = g(rng);
    std::vector<double> x1 = b, x2 = b;
    inc.solve(x1);
    fresh.solve(x2);
    CHECK(x1 == x2);
  }
  CHECK(factor_error(inc, K) < 1e-12);

  CHECK_THROWS_AS(inc.refactor(K, n + 1), std::invalid_argument);
}

TEST_CASE("small rebase oracle by hand") {
  // K_A and K_B share the pattern; only rows >= 1 differ.
  SparseSpd A(0);
  A.append_row({0}, {4.0});
  A.append_row({0, 1}, {2.0, 9.0});
  A.append_row({0, 1, 2}, {0.0, 2.0, 7.0});

  EnvelopeCholesky chol;
  chol.factor(A);

  SparseSpd B(0);
  B.append_row({0}, {4.0});
  B.append_row({0, 1}, {2.0, 5.0});
  B.append_row({0, 1, 2}, {0.0, 1.0, 3.0});

  chol.refactor(B, 1);
  CHECK(factor_error(chol, B) < 1e-14);
}

TEST_CASE("leading flops freeze once the marker is set") {
  const int n = 20, p = 8;
  Eigen::MatrixXd A = random_spd_dense(n, 21);
  SparseSpd K = from_dense(A);

  EnvelopeCholesky chol;
  chol.set_leading_marker(p);
  chol.factor(K);
  std::uint64_t lead0 = chol.leading_flops();
  std::uint64_t fact0 = chol.factor_flops();
  CHECK(lead0 > 0);
  CHECK(fact0 > lead0);

  for (int i = p; i < n; ++i) K.add(i, i, 0.5);
  chol.refactor(K, p);
  CHECK(chol.leading_flops() == lead0);
  CHECK(chol.factor_flops() > fact0);

  std::vector<double> x(static_cast<std::size_t>(n), 1.0);
  chol.solve(x);
  CHECK(chol.solve_flops() > 0);
}

TEST_CASE("indefinite matrix reports the failing row") {
  SparseSpd K(0);
  K.append_row({0}, {1.0});
  K.append_row({0, 1}, {2.0, 1.0});  // [[1,2],[2,1]] has a negative eigenvalue
  EnvelopeCholesky chol;
  try {
    chol.factor(K);
    FAIL("expected NotSpdError");
  } catch (const NotSpdError& e) {
    CHECK(e.row == 1);
  }
}
