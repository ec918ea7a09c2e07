#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "durx/assembly.hpp"
#include "durx/cholesky.hpp"
#include "durx/sparse.hpp"

namespace durx {

struct SolveStats {
  std::string mode;  // full | baseline | dur | rebase
  double solve_seconds = 0.0;
  double eta_percent = 0.0;
  int n_changed = 0;
  int n_active = 0;
  int border_cols = 0;   // dense Schur dimension
  int border_solves = 0; // new columns solved this step
  int refactor_start = -1;
  int cache_rebuilds = 0;
  std::uint64_t factor_flops = 0;
  std::uint64_t solve_flops = 0;
  double residual = 0.0;
};

struct Partition {
  std::vector<int> balanced;
  std::vector<int> unbalanced;
};

// Splits dofs by whether their equation could have changed: rows
// touched by the delta update plus rows with a residual above eps.
Partition classify_dofs(int n, const std::vector<int>& changed_rows,
                        const std::vector<double>& delta, double eps);

// Factor + solve + one refinement sweep.  L is reused as workspace so
// callers can keep the factor.
std::vector<double> full_solve(const SparseSpd& K, const std::vector<double>& F,
                               EnvelopeCholesky& L, SolveStats* stats = nullptr);

// Reanalysis engine.  baseline() factors the full system once; step()
// solves each propagation step against that factorization, treating
// only appended, masked and re-summed dofs as unknowns of a dense
// reduced system and back-substituting the rest through the frozen
// factor.  When the changed fraction exceeds the threshold (or the
// residual guard trips) it refactors, but only from the first changed
// row, so the leading block is never refactored.
class DurEngine {
 public:
  struct Config {
    double eta_percent = 5.0;    // rebase trigger, 100 disables
    double residual_tol = 1e-9;  // guard on |F - K U| / |F|
    double screen_eps_rel = 1e-12;  // residual entries below this times |F| are zeros
    int leading_marker = 0;  // standard-block dof count, for flop audit
  };

  explicit DurEngine(Config cfg) : cfg_(cfg) {}

  std::vector<double> baseline(const SparseSpd& K, const std::vector<double>& F,
                               SolveStats* stats = nullptr);

  std::vector<double> step(const SparseSpd& K, const std::vector<double>& F,
                           const DeltaResult& delta, SolveStats* stats = nullptr);

  const EnvelopeCholesky& factor() const { return chol_; }
  // Cumulative changed fraction since the last rebase, n/N x 100.
  double eta_percent(int n_total) const;

 private:
  void reset_window(const SparseSpd& K, const std::vector<double>& u);
  std::vector<double> rebase(const SparseSpd& K, const std::vector<double>& F,
                             SolveStats* stats);
  void rebuild_window_caches(const SparseSpd& K);
  void add_border_columns(const SparseSpd& K, const std::vector<int>& fresh);
  // Exact block solve of K x = rho with the current partition.
  std::vector<double> partition_solve(const SparseSpd& K, const std::vector<double>& rho);

  Config cfg_;
  EnvelopeCholesky chol_;
  int nb_ = 0;                // factored system size
  std::vector<double> uref_;  // solution the factor was taken at
  std::vector<char> role_;    // 0 balanced, 1 border, 2 masked
  std::vector<int> dlist_;    // border dofs, ascending
  std::vector<int> wlist_;    // bordered-out baseline rows, ascending
  std::set<int> changed_cum_;
  int n_masked_cum_ = 0;
  int min_changed_row_ = -1;
  int p_stop_ = 0;
  int support_min_ = 0;

  struct DenseChol {
    std::vector<std::vector<double>> rows;
    int size() const { return static_cast<int>(rows.size()); }
    void clear() { rows.clear(); }
    void append(const std::vector<double>& sym_row);
    void solve(std::vector<double>& x) const;
    void fwd(std::vector<double>& x) const;
  };

  std::map<int, std::vector<std::pair<int, double>>> ucols_;  // border k -> K[m, k]
  std::map<int, std::vector<double>> zcols_;  // border k -> K_B^-1 u_k (rows >= p_stop_)
  std::map<int, std::vector<double>> zh_;     // border k -> Lh^-1 (Z_k at W)
  std::vector<std::vector<double>> gcols_;    // per W member (rows >= p_stop_)
  DenseChol lh_;                              // factor of the W Gram matrix
  DenseChol ls_;                              // factor of the reduced system
  std::map<std::pair<int, int>, double> ttab_;
  SolveStats pending_;
};

}  // namespace durx
