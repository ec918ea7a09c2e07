#include "durx/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace durx {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_inf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// F - K u with compensated products and sums.  Near a mechanism
// ||K||*||u|| dwarfs ||F||, so a plain residual is all roundoff right
// where refinement needs it; this keeps roughly twice the digits.
std::vector<double> residual_accurate(const SparseSpd& K, const std::vector<double>& u,
                                      const std::vector<double>& F) {
  const int n = K.size();
  std::vector<double> s(n, 0.0), c(n, 0.0);
  auto acc = [&](int i, double a, double b) {
    const double p = a * b;
    const double perr = std::fma(a, b, -p);
    const double t = s[static_cast<std::size_t>(i)] + p;
    c[static_cast<std::size_t>(i)] +=
        (std::abs(s[static_cast<std::size_t>(i)]) >= std::abs(p))
            ? ((s[static_cast<std::size_t>(i)] - t) + p)
            : ((p - t) + s[static_cast<std::size_t>(i)]);
    c[static_cast<std::size_t>(i)] += perr;
    s[static_cast<std::size_t>(i)] = t;
  };
  for (int i = 0; i < n; ++i) {
    const auto& cs = K.row_cols(i);
    const auto& vs = K.row_vals(i);
    const double ui = u[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const int j = cs[k];
      const double v = vs[k];
      if (v == 0.0) continue;
      acc(i, v, u[static_cast<std::size_t>(j)]);
      if (j != i) acc(j, v, ui);
    }
  }
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    r[k] = (F[k] - s[k]) - c[k];
  }
  return r;
}

std::vector<double> residual_vec(const SparseSpd& K, const std::vector<double>& u,
                                 const std::vector<double>& F) {
  std::vector<double> r = K.multiply(u);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = F[i] - r[i];
  return r;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Residual target for iterative refinement, well below the rebase
// guard so accepted solutions agree to solver-independent accuracy.
constexpr double refine_target = 1e-13;

// Each pass gains roughly a factor eps*cond, so late-run systems that
// turn ill-conditioned (thin ligaments, tips hugging a boundary) may
// need more than one sweep.  Stops once the target is met, a pass
// fails to halve the residual, or the pass budget runs out; returns
// the relative residual reached.
template <class SolveFn>
double refine_residual(const SparseSpd& K, const std::vector<double>& F,
                       std::vector<double>& u, int max_passes, SolveFn solve) {
  const double fn = std::max(norm2(F), 1e-300);
  double resid = std::numeric_limits<double>::infinity();
  for (int pass = 0;; ++pass) {
    std::vector<double> r = residual_accurate(K, u, F);
    const double now = norm2(r) / fn;
    const bool improved = now < 0.9 * resid;
    resid = now;
    if (resid <= refine_target || !improved || pass >= max_passes) break;
    solve(r);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += r[i];
  }
  return resid;
}

}  // namespace

Partition classify_dofs(int n, const std::vector<int>& changed_rows,
                        const std::vector<double>& delta, double eps) {
  std::vector<char> hot(n, 0);
  for (int r : changed_rows) {
    if (r < 0 || r >= n) throw std::invalid_argument("classify_dofs: row out of range");
    hot[r] = 1;
  }
  for (int i = 0; i < n && i < static_cast<int>(delta.size()); ++i)
    if (std::abs(delta[i]) > eps) hot[i] = 1;
  Partition p;
  for (int i = 0; i < n; ++i) (hot[i] ? p.unbalanced : p.balanced).push_back(i);
  return p;
}

std::vector<double> full_solve(const SparseSpd& K, const std::vector<double>& F,
                               EnvelopeCholesky& L, SolveStats* stats) {
  if (static_cast<int>(F.size()) != K.size())
    throw std::invalid_argument("full_solve: rhs size mismatch");
  const double t0 = now_seconds();
  const std::uint64_t f0 = L.factor_flops();
  const std::uint64_t s0 = L.solve_flops();
  L.refactor(K, 0);
  std::vector<double> u = F;
  L.solve(u);
  const double resid =
      refine_residual(K, F, u, 10, [&](std::vector<double>& x) { L.solve(x); });
  if (stats) {
    stats->mode = "full";
    stats->solve_seconds = now_seconds() - t0;
    stats->factor_flops = L.factor_flops() - f0;
    stats->solve_flops = L.solve_flops() - s0;
    stats->residual = resid;
    stats->refactor_start = 0;
    stats->n_active = K.size();
  }
  return u;
}

void DurEngine::DenseChol::append(const std::vector<double>& sym_row) {
  const int n = size();
  if (static_cast<int>(sym_row.size()) != n + 1)
    throw std::invalid_argument("DenseChol: bad row length");
  std::vector<double> lr(n + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    double v = sym_row[j];
    const auto& rj = rows[j];
    for (int k = 0; k < j; ++k) v -= lr[k] * rj[k];
    lr[j] = v / rj[j];
  }
  double d = sym_row[n];
  for (int k = 0; k < n; ++k) d -= lr[k] * lr[k];
  if (!(d > 0.0)) throw NotSpdError(n, d);
  lr[n] = std::sqrt(d);
  rows.push_back(std::move(lr));
}

void DurEngine::DenseChol::fwd(std::vector<double>& x) const {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    double v = x[i];
    const auto& ri = rows[i];
    for (int k = 0; k < i; ++k) v -= ri[k] * x[k];
    x[i] = v / ri[i];
  }
}

void DurEngine::DenseChol::solve(std::vector<double>& x) const {
  fwd(x);
  const int n = size();
  for (int i = n - 1; i >= 0; --i) {
    const double xi = x[i] / rows[i][i];
    x[i] = xi;
    if (xi == 0.0) continue;
    const auto& ri = rows[i];
    for (int k = 0; k < i; ++k) x[k] -= ri[k] * xi;
  }
}

std::vector<double> DurEngine::baseline(const SparseSpd& K, const std::vector<double>& F,
                                        SolveStats* stats) {
  chol_.set_leading_marker(cfg_.leading_marker);
  min_changed_row_ = 0;
  std::vector<double> u = rebase(K, F, stats);
  if (stats) stats->mode = "baseline";
  return u;
}

std::vector<double> DurEngine::rebase(const SparseSpd& K, const std::vector<double>& F,
                                      SolveStats* stats) {
  const double t0 = now_seconds();
  const std::uint64_t f0 = chol_.factor_flops();
  const std::uint64_t s0 = chol_.solve_flops();
  int p = min_changed_row_ < 0 ? chol_.size() : min_changed_row_;
  p = std::max(0, std::min(p, chol_.size()));
  chol_.refactor(K, p);
  std::vector<double> u = F;
  chol_.solve(u);
  const double resid =
      refine_residual(K, F, u, 10, [&](std::vector<double>& x) { chol_.solve(x); });
  if (resid > cfg_.residual_tol)
    throw std::runtime_error("refactored solve failed to reach residual tolerance: |r|/|F| = " +
                             std::to_string(resid) + " after refactor from row " +
                             std::to_string(p) + " of " + std::to_string(K.size()));
  reset_window(K, u);
  if (stats) {
    stats->mode = "rebase";
    stats->solve_seconds += now_seconds() - t0;
    stats->factor_flops += chol_.factor_flops() - f0;
    stats->solve_flops += chol_.solve_flops() - s0;
    stats->residual = resid;
    stats->refactor_start = p;
    stats->n_active = K.size() - n_masked_cum_;
  }
  return u;
}

void DurEngine::reset_window(const SparseSpd& K, const std::vector<double>& u) {
  nb_ = K.size();
  uref_ = u;
  role_.assign(nb_, 0);
  dlist_.clear();
  wlist_.clear();
  changed_cum_.clear();
  min_changed_row_ = -1;
  p_stop_ = nb_;
  support_min_ = nb_;
  ucols_.clear();
  zcols_.clear();
  zh_.clear();
  gcols_.clear();
  lh_.clear();
  ls_.clear();
  ttab_.clear();
}

double DurEngine::eta_percent(int n_total) const {
  if (n_total <= 0) return 0.0;
  return 100.0 * static_cast<double>(changed_cum_.size()) / n_total;
}

void DurEngine::rebuild_window_caches(const SparseSpd& K) {
  ++pending_.cache_rebuilds;
  wlist_.clear();
  for (int d = 0; d < nb_; ++d)
    if (role_[d] != 0) wlist_.push_back(d);
  dlist_.clear();
  for (int d = 0; d < static_cast<int>(role_.size()); ++d)
    if (role_[d] == 1) dlist_.push_back(d);

  ucols_.clear();
  int smin = nb_;
  for (int d : dlist_) {
    auto col = K.column(d);
    std::vector<std::pair<int, double>> u;
    for (auto& [row, val] : col)
      if (row < nb_ && role_[row] == 0) u.emplace_back(row, val);
    if (!u.empty()) smin = std::min(smin, u.front().first);
    ucols_[d] = std::move(u);
  }
  if (!wlist_.empty()) smin = std::min(smin, wlist_.front());
  support_min_ = smin;
  // Slack below the support postpones the next rebuild while the crack
  // drifts toward lower node rows.
  p_stop_ = std::max(0, support_min_ - 2048);

  // Gram of the bordered-out baseline rows.
  gcols_.assign(wlist_.size(), {});
  for (std::size_t i = 0; i < wlist_.size(); ++i) {
    gcols_[i].assign(nb_, 0.0);
    gcols_[i][wlist_[i]] = 1.0;
  }
  chol_.solve_panel(gcols_, p_stop_);
  lh_.clear();
  for (std::size_t i = 0; i < wlist_.size(); ++i) {
    std::vector<double> row(i + 1);
    for (std::size_t j = 0; j <= i; ++j) row[j] = gcols_[j][wlist_[i]];
    lh_.append(row);
  }

  zcols_.clear();
  zh_.clear();
  ttab_.clear();
  {
    std::vector<std::vector<double>> zs(dlist_.size());
    for (std::size_t i = 0; i < dlist_.size(); ++i) {
      zs[i].assign(nb_, 0.0);
      for (auto& [row, val] : ucols_[dlist_[i]]) zs[i][row] = val;
    }
    chol_.solve_panel(zs, p_stop_);
    for (std::size_t i = 0; i < dlist_.size(); ++i) zcols_[dlist_[i]] = std::move(zs[i]);
  }
  for (int d : dlist_) {
    std::vector<double> z(wlist_.size());
    for (std::size_t i = 0; i < wlist_.size(); ++i) z[i] = zcols_[d][wlist_[i]];
    lh_.fwd(z);
    zh_[d] = std::move(z);
  }
  for (std::size_t a = 0; a < dlist_.size(); ++a)
    for (std::size_t b = a; b < dlist_.size(); ++b) {
      const int da = dlist_[a], db = dlist_[b];
      double t = 0.0;
      const auto& z = zcols_[db];
      for (auto& [row, val] : ucols_[da]) t += val * z[row];
      ttab_[{da, db}] = t;
    }
}

void DurEngine::add_border_columns(const SparseSpd& K, const std::vector<int>& fresh) {
  if (fresh.empty()) return;
  // Gather the new columns first; a support row below the cached solve
  // window forces a full rebuild.
  int smin = support_min_;
  std::map<int, std::vector<std::pair<int, double>>> newcols;
  for (int d : fresh) {
    auto col = K.column(d);
    std::vector<std::pair<int, double>> u;
    for (auto& [row, val] : col)
      if (row < nb_ && role_[row] == 0) u.emplace_back(row, val);
    if (!u.empty()) smin = std::min(smin, u.front().first);
    newcols[d] = std::move(u);
  }
  if (smin < p_stop_) {
    rebuild_window_caches(K);
    return;
  }
  support_min_ = smin;
  pending_.border_solves += static_cast<int>(fresh.size());
  std::vector<std::vector<double>> zs(fresh.size());
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    zs[i].assign(nb_, 0.0);
    for (auto& [row, val] : newcols[fresh[i]]) zs[i][row] = val;
  }
  chol_.solve_panel(zs, p_stop_);
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    const int d = fresh[i];
    ucols_[d] = std::move(newcols[d]);
    zcols_[d] = std::move(zs[i]);
    std::vector<double> z(wlist_.size());
    for (std::size_t w = 0; w < wlist_.size(); ++w) z[w] = zcols_[d][wlist_[w]];
    lh_.fwd(z);
    zh_[d] = std::move(z);
  }
  for (int d : fresh)
    for (int e : dlist_) {
      const int a = std::min(d, e), b = std::max(d, e);
      if (ttab_.count({a, b})) continue;
      double t = 0.0;
      const auto& z = zcols_[b];
      for (auto& [row, val] : ucols_[a]) t += val * z[row];
      ttab_[{a, b}] = t;
    }
}

std::vector<double> DurEngine::partition_solve(const SparseSpd& K,
                                               const std::vector<double>& rho) {
  const int n = K.size();
  std::vector<double> rhom(nb_, 0.0);
  int first = nb_;
  for (int i = 0; i < nb_; ++i)
    if (role_[i] == 0 && rho[i] != 0.0) {
      rhom[i] = rho[i];
      first = std::min(first, i);
    }
  const bool have_m_rhs = first < nb_;

  // Reduced right-hand side: rho_d - u_d . Kmm^-1 rho_m.
  std::vector<double> y(dlist_.size(), 0.0);
  std::vector<double> s;
  if (have_m_rhs && !dlist_.empty()) {
    s = rhom;
    chol_.solve_restricted(s, p_stop_);
    if (!wlist_.empty()) {
      std::vector<double> alpha(wlist_.size());
      for (std::size_t w = 0; w < wlist_.size(); ++w) alpha[w] = s[wlist_[w]];
      lh_.solve(alpha);
      for (std::size_t w = 0; w < wlist_.size(); ++w) {
        const double a = alpha[w];
        if (a == 0.0) continue;
        const auto& g = gcols_[w];
        for (int i = p_stop_; i < nb_; ++i) s[i] -= a * g[i];
      }
    }
  }
  for (std::size_t idx = 0; idx < dlist_.size(); ++idx) {
    const int d = dlist_[idx];
    double v = rho[d];
    if (!s.empty())
      for (auto& [row, val] : ucols_.at(d)) v -= val * s[row];
    y[idx] = v;
  }
  ls_.solve(y);

  // Balanced block back-substitution through the frozen factor.
  std::vector<double> r2 = rhom;
  for (std::size_t idx = 0; idx < dlist_.size(); ++idx) {
    const double yv = y[idx];
    if (yv == 0.0) continue;
    for (auto& [row, val] : ucols_.at(dlist_[idx])) r2[row] -= val * yv;
  }
  std::vector<double> x2(nb_, 0.0);
  {
    bool any = false;
    for (double v : r2)
      if (v != 0.0) { any = true; break; }
    if (any) {
      if (!wlist_.empty()) {
        std::vector<double> s1 = r2;
        chol_.solve_restricted(s1, p_stop_);
        std::vector<double> alpha(wlist_.size());
        for (std::size_t w = 0; w < wlist_.size(); ++w) alpha[w] = s1[wlist_[w]];
        lh_.solve(alpha);
        for (std::size_t w = 0; w < wlist_.size(); ++w) r2[wlist_[w]] -= alpha[w];
      }
      x2 = r2;
      chol_.solve(x2);
    }
  }

  std::vector<double> x(n, 0.0);
  for (int i = 0; i < nb_; ++i)
    if (role_[i] == 0) x[i] = x2[i];
  for (std::size_t idx = 0; idx < dlist_.size(); ++idx) x[dlist_[idx]] = y[idx];
  for (int i = 0; i < n; ++i)
    if (role_[i] == 2) x[i] = rho[i];
  return x;
}

std::vector<double> DurEngine::step(const SparseSpd& K, const std::vector<double>& F,
                                    const DeltaResult& delta, SolveStats* stats) {
  if (nb_ == 0) throw std::logic_error("DurEngine::step before baseline");
  const int n = K.size();
  if (static_cast<int>(F.size()) != n)
    throw std::invalid_argument("DurEngine::step: rhs size mismatch");
  const double t0 = now_seconds();
  const std::uint64_t f0 = chol_.factor_flops();
  const std::uint64_t s0 = chol_.solve_flops();
  pending_ = SolveStats{};

  role_.resize(n, 0);
  for (int d : delta.appended) role_[d] = 1;
  auto evict = [&](int d) {
    ucols_.erase(d);
    zcols_.erase(d);
    zh_.erase(d);
    for (auto it = ttab_.begin(); it != ttab_.end();)
      it = (it->first.first == d || it->first.second == d) ? ttab_.erase(it) : ++it;
  };
  // A baseline row that gets masked or re-summed joins the bordered-out
  // window for good; churn on appended rows only replaces their cached
  // columns, so the expensive window rebuild stays rare.
  bool w_grew = false;
  for (int r : delta.masked) {
    if (role_[r] == 1)
      evict(r);
    else if (role_[r] == 0 && r < nb_)
      w_grew = true;
    role_[r] = 2;
    ++n_masked_cum_;
  }
  for (int c : delta.value_changed) {
    if (role_[c] == 0) {
      role_[c] = 1;
      if (c < nb_) w_grew = true;
    } else if (role_[c] == 1) {
      evict(c);
    }
  }

  // The factor start at the next rebase only needs to cover rows whose
  // stored values moved: re-summed pairs land in their higher dof's
  // row, and masking changes nothing below the masked index.
  int min_row = n;
  for (int d : delta.appended) min_row = std::min(min_row, d);
  for (int d : delta.masked) min_row = std::min(min_row, d);
  for (int d : delta.value_changed) min_row = std::min(min_row, d);
  if (min_row < n)
    min_changed_row_ = min_changed_row_ < 0 ? min_row : std::min(min_changed_row_, min_row);
  for (int d : delta.changed_rows) changed_cum_.insert(d);
  for (int d : delta.appended) changed_cum_.insert(d);
  for (int d : delta.masked) changed_cum_.insert(d);

  const int n_active = n - n_masked_cum_;
  const double eta = eta_percent(n);  // changed fraction over total dofs
  if (eta > cfg_.eta_percent) {
    SolveStats st{};
    std::vector<double> u = rebase(K, F, &st);
    st.eta_percent = eta;
    st.n_changed = static_cast<int>(changed_cum_.size());
    if (stats) *stats = st;
    return u;
  }

  // Refresh the border list from roles; masked members fall out, and
  // appended or evicted columns get solved as fresh ones.
  {
    std::vector<int> dl;
    for (int d = 0; d < n; ++d)
      if (role_[d] == 1) dl.push_back(d);
    dlist_ = std::move(dl);
    if (w_grew) {
      rebuild_window_caches(K);
    } else {
      std::vector<int> fresh;
      for (int d : dlist_)
        if (!ucols_.count(d)) fresh.push_back(d);
      add_border_columns(K, fresh);
    }
  }

  // Reduced matrix over the live border, refactored from cached pieces.
  ls_.clear();
  try {
    for (std::size_t a = 0; a < dlist_.size(); ++a) {
      std::vector<double> row(a + 1);
      for (std::size_t b = 0; b <= a; ++b) {
        const int da = dlist_[a], db = dlist_[b];
        const auto key = std::make_pair(std::min(da, db), std::max(da, db));
        double v = K.at(da, db) - ttab_.at(key);
        const auto& za = zh_.at(da);
        const auto& zb = zh_.at(db);
        for (std::size_t w = 0; w < za.size(); ++w) v += za[w] * zb[w];
        row[b] = v;
      }
      ls_.append(row);
    }
  } catch (const NotSpdError&) {
    SolveStats st{};
    std::vector<double> u = rebase(K, F, &st);
    st.eta_percent = eta;
    st.n_changed = static_cast<int>(changed_cum_.size());
    if (stats) *stats = st;
    return u;
  }

  std::vector<double> upad = uref_;
  upad.resize(n, 0.0);
  const double fnorm_inf = norm_inf(F);
  const double screen = cfg_.screen_eps_rel * std::max(fnorm_inf, 1e-300);

  std::vector<double> rho = residual_vec(K, upad, F);
  for (double& v : rho)
    if (std::abs(v) < screen) v = 0.0;
  std::vector<double> u = upad;
  {
    std::vector<double> dx = partition_solve(K, rho);
    for (int i = 0; i < n; ++i) u[i] += dx[i];
  }
  // Refinement sweeps through the same reduced operator; their rhs is
  // pure roundoff dust, so no screening here.
  const double resid = refine_residual(
      K, F, u, 8, [&](std::vector<double>& x) { x = partition_solve(K, x); });
  if (resid > cfg_.residual_tol) {
    SolveStats st{};
    u = rebase(K, F, &st);
    st.eta_percent = eta;
    st.n_changed = static_cast<int>(changed_cum_.size());
    st.cache_rebuilds = pending_.cache_rebuilds;
    if (stats) *stats = st;
    return u;
  }

  if (stats) {
    stats->mode = "dur";
    stats->solve_seconds = now_seconds() - t0;
    stats->eta_percent = eta;
    stats->n_changed = static_cast<int>(changed_cum_.size());
    stats->n_active = n_active;
    stats->border_cols = static_cast<int>(dlist_.size());
    stats->border_solves = pending_.border_solves;
    stats->cache_rebuilds = pending_.cache_rebuilds;
    stats->factor_flops = chol_.factor_flops() - f0;
    stats->solve_flops = chol_.solve_flops() - s0;
    stats->residual = resid;
    stats->refactor_start = -1;
  }
  return u;
}

}  // namespace durx
