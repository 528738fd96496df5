#include "pcfit/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pcfit/math_util.hpp"

namespace pcfit {

void ConstraintSpec::normalize() {
  for (auto& iv : intervals) {
    if (iv.sign != 1 && iv.sign != -1)
      throw std::invalid_argument("ConstraintSpec: sign must be +-1");
    if (!(iv.lo < iv.hi))
      throw std::invalid_argument("ConstraintSpec: interval needs lo < hi");
    if (iv.deriv < 0) throw std::invalid_argument("ConstraintSpec: negative deriv");
  }
  std::sort(intervals.begin(), intervals.end(), [](const auto& a, const auto& b) {
    return a.deriv != b.deriv ? a.deriv < b.deriv : a.lo < b.lo;
  });
  std::vector<ConstraintInterval> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && merged.back().deriv == iv.deriv &&
        iv.lo <= merged.back().hi + 1e-15) {
      if (merged.back().sign != iv.sign)
        throw std::invalid_argument("ConstraintSpec: conflicting overlapping intervals");
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  intervals = std::move(merged);
}

std::vector<SparseRow> constraint_rows(const SplineSystem& sys,
                                       const ConstraintSpec& constraints) {
  std::vector<SparseRow> rows;
  for (const auto& iv : constraints.intervals) {
    if (iv.deriv > sys.order() + 1)
      throw std::invalid_argument("constraint_rows: derivative order above m + 1");
    for (int k = 0; k < sys.deriv_nodes(iv.deriv); ++k) {
      double x = sys.deriv_abscissa(iv.deriv, k);
      if (x < iv.lo - 1e-12 || x > iv.hi + 1e-12) continue;
      SplineSystem::Row r = sys.derivative_row(iv.deriv, k);
      SparseRow row;
      row.first = r.first;
      row.coef = std::move(r.coef);
      if (iv.sign < 0)
        for (double& c : row.coef) c = -c;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

// Dense lower-triangular Cholesky of the working-set Schur complement, grown
// one column at a time and shrunk by a rank-one update of the trailing block.
class DenseChol {
 public:
  std::size_t size() const { return l_.size(); }

  // append with new column m_col (entries against existing rows) and diagonal d
  void append(const std::vector<double>& m_col, double d) {
    const std::size_t n = size();
    std::vector<double> w(m_col);
    forward(w);
    double s = d;
    for (double v : w) s -= v * v;
    if (!(s > 1e-12 * std::max(d, 1e-300)))
      throw ConditioningError("active set: dependent constraint row");
    w.push_back(std::sqrt(s));
    l_.push_back(std::move(w));
    (void)n;
  }

  // remove index k; trailing block absorbs the dropped column by rank-one update
  void remove(std::size_t k) {
    std::vector<double> spike;
    spike.reserve(size() - k - 1);
    for (std::size_t i = k + 1; i < size(); ++i) spike.push_back(l_[i][k]);
    for (std::size_t i = k + 1; i < size(); ++i) l_[i].erase(l_[i].begin() + k);
    l_.erase(l_.begin() + k);
    // rank-one update of rows k.. by the spike
    for (std::size_t j = k; j < size(); ++j) {
      double ljj = l_[j][j];
      double v = spike[j - k];
      double r = std::hypot(ljj, v);
      double c = r / ljj, s = v / ljj;
      l_[j][j] = r;
      for (std::size_t i = j + 1; i < size(); ++i) {
        l_[i][j] = (l_[i][j] + s * spike[i - k]) / c;
        spike[i - k] = c * spike[i - k] - s * l_[i][j];
      }
    }
  }

  // solve L L^T out = rhs
  std::vector<double> solve(std::vector<double> rhs) const {
    forward(rhs);
    for (std::size_t ii = size(); ii-- > 0;) {
      double v = rhs[ii];
      for (std::size_t j = ii + 1; j < size(); ++j) v -= l_[j][ii] * rhs[j];
      rhs[ii] = v / l_[ii][ii];
    }
    return rhs;
  }

 private:
  void forward(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      double v = x[i];
      for (std::size_t j = 0; j < i; ++j) v -= l_[i][j] * x[j];
      x[i] = v / l_[i][i];
    }
  }
  std::vector<std::vector<double>> l_;  // row i holds entries 0..i
};

struct Workspace {
  const std::vector<SparseRow>& rows;
  const BandCholesky& chol;

  // memoized u_r = Q^{-1} c_r and the full Schur column C u_r
  std::vector<int> col_of_row;
  std::vector<std::vector<double>> ucols;
  std::vector<std::vector<double>> schur_cols;
  std::vector<int> row_of_col;

  explicit Workspace(const std::vector<SparseRow>& r, const BandCholesky& c, int n)
      : rows(r), chol(c), col_of_row(rows.size(), -1), n_(n) {}

  int column(int r) {
    if (col_of_row[r] >= 0) return col_of_row[r];
    std::vector<double> cvec(n_, 0.0);
    for (std::size_t j = 0; j < rows[r].coef.size(); ++j)
      cvec[rows[r].first + j] = rows[r].coef[j];
    std::vector<double> u = chol.solve(cvec);
    std::vector<double> sc(rows.size());
    for (std::size_t s = 0; s < rows.size(); ++s) sc[s] = rows[s].dot(u);
    col_of_row[r] = static_cast<int>(ucols.size());
    ucols.push_back(std::move(u));
    schur_cols.push_back(std::move(sc));
    row_of_col.push_back(r);
    return col_of_row[r];
  }

 private:
  int n_;
};

}  // namespace

QpSolution active_set_qp(const SymBandMatrix& q, std::span<const double> b,
                         const std::vector<SparseRow>& rows, const QpOptions& options) {
  const int n = q.size();
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("active_set_qp: size mismatch");
  for (const auto& r : rows)
    if (r.first < 0 || r.first + static_cast<int>(r.coef.size()) > n || r.coef.empty())
      throw std::invalid_argument("active_set_qp: row outside the variable range");

  const int n_rows = static_cast<int>(rows.size());
  const int cap = options.max_iterations > 0 ? options.max_iterations
                                             : 10 * n_rows + 100;
  BandCholesky chol(q);
  std::vector<double> v = chol.solve(b);
  double vb = 0.0;
  for (int i = 0; i < n; ++i) vb += v[i] * b[i];

  QpSolution sol;
  auto finalize = [&](const std::vector<double>& x, const std::vector<int>& active,
                      const std::vector<double>& mu) {
    sol.values = x;
    sol.active_set = active;
    sol.multipliers = mu;
    // KKT certificate: stationarity, feasibility, dual signs, complementarity
    std::vector<double> qx = q.multiply(x);
    for (int i = 0; i < n; ++i) qx[i] -= b[i];
    for (std::size_t j = 0; j < active.size(); ++j) {
      const SparseRow& r = rows[active[j]];
      for (std::size_t a = 0; a < r.coef.size(); ++a)
        qx[r.first + a] -= mu[j] * r.coef[a];
    }
    double stat = 0.0;
    for (double g : qx) stat = std::max(stat, std::abs(g));
    double bscale = 1.0;
    for (double bi : b) bscale = std::max(bscale, std::abs(bi));
    double feas = 0.0, comp = 0.0, dual = 0.0;
    for (int r = 0; r < n_rows; ++r) feas = std::max(feas, -rows[r].dot(x));
    for (std::size_t j = 0; j < active.size(); ++j) {
      comp = std::max(comp, std::abs(rows[active[j]].dot(x)));
      dual = std::max(dual, -mu[j]);
    }
    sol.kkt_residual = std::max({stat / bscale, feas, comp, dual});
  };

  if (n_rows == 0) {
    finalize(v, {}, {});
    sol.converged = true;
    sol.objective_trace.push_back(0.5 * vb - vb);
    return sol;
  }

  std::vector<double> cv(n_rows);
  for (int r = 0; r < n_rows; ++r) cv[r] = rows[r].dot(v);

  // warm start: unconstrained minimizer already feasible
  double worst = 0.0;
  for (double c : cv) worst = std::min(worst, c);
  if (worst >= -options.feas_tol) {
    finalize(v, {}, {});
    sol.converged = true;
    sol.objective_trace.push_back(0.5 * vb - vb);
    return sol;
  }

  Workspace ws(rows, chol, n);
  std::vector<int> active;
  std::vector<char> is_active(n_rows, 0);
  DenseChol schur;
  std::vector<double> mu;

  auto add_row = [&](int r) {
    int col = ws.column(r);
    std::vector<double> m_col(active.size());
    for (std::size_t j = 0; j < active.size(); ++j)
      m_col[j] = ws.schur_cols[col][active[j]];
    schur.append(m_col, ws.schur_cols[col][r]);
    active.push_back(r);
    is_active[r] = 1;
  };
  auto solve_mu = [&]() {
    std::vector<double> rhs(active.size());
    for (std::size_t j = 0; j < active.size(); ++j) rhs[j] = -cv[active[j]];
    mu = schur.solve(std::move(rhs));
  };

  // initial working set: rows the unconstrained minimizer violates
  // (x = 0 lies on every constraint boundary, so any subset is admissible)
  for (int r = 0; r < n_rows; ++r)
    if (cv[r] < -options.feas_tol) add_row(r);

  // scalar iterate state: x as a combination (s_x * v + sum coef_c * u_c)
  double s_x = 0.0;
  std::vector<double> coef;            // per allocated column
  std::vector<double> cx(n_rows, 0.0); // c_r . x
  auto objective = [&]() {
    // b.x and x^T Q x from scalars: Q v = b, Q u_c = c_row
    double bx = s_x * vb;
    for (std::size_t c = 0; c < coef.size(); ++c)
      if (coef[c] != 0.0) bx += coef[c] * cv[ws.row_of_col[c]];
    double xqx = s_x * bx;
    for (std::size_t c = 0; c < coef.size(); ++c)
      if (coef[c] != 0.0) xqx += coef[c] * cx[ws.row_of_col[c]];
    return 0.5 * xqx - bx;
  };
  auto assemble_x = [&]() {
    std::vector<double> x(n, 0.0);
    for (int i = 0; i < n; ++i) x[i] = s_x * v[i];
    for (std::size_t c = 0; c < coef.size(); ++c)
      if (coef[c] != 0.0)
        for (int i = 0; i < n; ++i) x[i] += coef[c] * ws.ucols[c][i];
    return x;
  };

  bool at_eqp = false;
  bool bland = false;
  std::set<std::vector<int>> seen;
  std::vector<double> cxhat(n_rows);
  double last_obj = objective();
  sol.objective_trace.push_back(last_obj);

  for (sol.iterations = 0; sol.iterations < cap; ++sol.iterations) {
    solve_mu();
    // c_r . x_hat for every row
    for (int r = 0; r < n_rows; ++r) cxhat[r] = cv[r];
    for (std::size_t j = 0; j < active.size(); ++j) {
      const auto& sc = ws.schur_cols[ws.col_of_row[active[j]]];
      double m = mu[j];
      if (m == 0.0) continue;
      for (int r = 0; r < n_rows; ++r) cxhat[r] += m * sc[r];
    }

    if (at_eqp) {
      double worst_mu = 0.0;
      int drop = -1;
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (bland) {
          if (mu[j] < -options.feas_tol &&
              (drop < 0 || active[j] < active[drop])) drop = static_cast<int>(j);
        } else if (mu[j] < worst_mu) {
          worst_mu = mu[j];
          drop = static_cast<int>(j);
        }
      }
      if (drop < 0 || (!bland && worst_mu >= -options.feas_tol)) {
        // optimal: x equals the equality-constrained solution
        std::vector<double> x(v);
        for (std::size_t j = 0; j < active.size(); ++j) {
          const auto& u = ws.ucols[ws.col_of_row[active[j]]];
          for (int i = 0; i < n; ++i) x[i] += mu[j] * u[i];
        }
        finalize(x, active, mu);
        sol.converged = sol.kkt_residual <= std::max(options.kkt_tol, options.feas_tol);
        if (!sol.converged)
          throw QpFailure("active_set_qp: KKT certificate failed", sol);
        return sol;
      }
      is_active[active[drop]] = 0;
      schur.remove(static_cast<std::size_t>(drop));
      active.erase(active.begin() + drop);
      at_eqp = false;
      auto key = active;
      std::sort(key.begin(), key.end());
      if (!seen.insert(key).second) {
        if (!bland) {
          bland = true;
          seen.clear();
        } else {
          sol.values = assemble_x();
          throw QpFailure("active_set_qp: cycling detected", sol);
        }
      }
      continue;
    }

    // line search from x toward x_hat
    double alpha = 1.0;
    int blocker = -1;
    double blocker_rate = 0.0;
    for (int r = 0; r < n_rows; ++r) {
      if (is_active[r]) continue;
      double d = cxhat[r] - cx[r];
      if (d >= -1e-13) continue;
      double a = std::max(0.0, -cx[r] / d);
      if (a < alpha - 1e-15 ||
          (a < alpha + 1e-15 && blocker >= 0 &&
           (bland ? r < blocker : d < blocker_rate))) {
        alpha = std::min(a, 1.0);
        blocker = r;
        blocker_rate = d;
      }
    }

    // apply the step in scalar space
    if (alpha != 0.0) {
      s_x = (1.0 - alpha) * s_x + alpha * 1.0;
      for (double& c : coef) c *= (1.0 - alpha);
      coef.resize(ws.ucols.size(), 0.0);
      for (std::size_t j = 0; j < active.size(); ++j)
        coef[ws.col_of_row[active[j]]] += alpha * mu[j];
      for (int r = 0; r < n_rows; ++r)
        cx[r] = (1.0 - alpha) * cx[r] + alpha * cxhat[r];
    }
    double obj = objective();
    sol.objective_trace.push_back(obj);
    if (obj < last_obj - 1e-12 * std::max(1.0, std::abs(last_obj))) {
      seen.clear();  // strict progress; cycles live at constant objective
      last_obj = obj;
    }

    if (blocker >= 0) {
      add_row(blocker);
      at_eqp = false;
      auto key = active;
      std::sort(key.begin(), key.end());
      if (!seen.insert(key).second) {
        if (!bland) {
          bland = true;
          seen.clear();
        } else {
          sol.values = assemble_x();
          throw QpFailure("active_set_qp: cycling detected", sol);
        }
      }
    } else {
      at_eqp = true;
    }
  }

  sol.values = assemble_x();
  std::vector<int> act = active;
  std::vector<double> m = mu;
  finalize(sol.values, act, m);
  throw QpFailure("active_set_qp: iteration cap exceeded", sol);
}

ConstrainedFit fit_constrained(const SampleSet& samples, const SplineConfig& config,
                               const ConstraintSpec& constraints) {
  ConstraintSpec spec = constraints;
  spec.normalize();
  for (const auto& iv : spec.intervals) {
    if (iv.lo < -1e-12 || iv.hi > 1.0 + 1e-12)
      throw std::invalid_argument("fit_constrained: interval outside [0,1]");
    if (iv.deriv > config.m + 1)
      throw std::invalid_argument("fit_constrained: constraint derivative above m + 1");
  }

  // standardize responses; the constraints are homogeneous so the solution
  // rescales linearly
  SampleSet scaled = samples;
  double s_y = scaled.y.size() > 1 ? std::sqrt(variance(scaled.y)) : 1.0;
  if (!(s_y > 1e-300)) s_y = 1.0;
  for (double& yv : scaled.y) yv /= s_y;
  SplineConfig cfg = config;
  cfg.sigma = config.sigma > 0 ? config.sigma : noise_sd(samples);
  // same lambda and sigma: the scaled objective is s_y^2 times the original,
  // so the minimizers correspond exactly under f -> f / s_y
  scaled.sigma = cfg.sigma;

  SplineSystem sys_scaled(scaled, cfg);
  std::vector<SparseRow> rows = constraint_rows(sys_scaled, spec);

  // In the huge-lambda regime the banded system is past the cancellation
  // threshold; the QP runs at the largest numerically safe lambda instead.
  // Both minimizers agree with the constrained null-space polynomial to
  // within the switch tolerance.
  double lambda_solve = cfg.lambda;
  if (sys_scaled.huge_lambda(lambda_solve)) {
    const double two_pi = 6.283185307179586476925287;
    lambda_solve =
        0.5 * 2e6 / (cfg.sigma * cfg.sigma) / std::pow(two_pi, 2 * cfg.m);
  }
  QpSolution qp = active_set_qp(sys_scaled.assemble(lambda_solve), sys_scaled.rhs(), rows);

  // map back to the original scale
  std::vector<double> values = qp.values;
  for (double& vv : values) vv *= s_y;
  for (double& vv : qp.values) vv *= s_y;
  for (double& mv : qp.multipliers) mv *= s_y;

  SplineSystem sys(samples, cfg);
  ConstrainedFit out{sys.finish(std::move(values), cfg.lambda), std::move(qp)};
  return out;
}

}  // namespace pcfit
