#ifndef PCFIT_CONSTRAINED_HPP
#define PCFIT_CONSTRAINED_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcfit/banded.hpp"
#include "pcfit/samples.hpp"
#include "pcfit/spline.hpp"

namespace pcfit {

/// Sign constraint on a derivative over an interval: sign * f^{(deriv)} >= 0
/// on [lo, hi].
struct ConstraintInterval {
  int deriv = 0;
  double lo = 0.0, hi = 0.0;
  int sign = 1;
};

struct ConstraintSpec {
  std::vector<ConstraintInterval> intervals;

  bool empty() const { return intervals.empty(); }

  /// Sort by (deriv, lo); merge overlapping same-sign intervals of the same
  /// derivative; throw std::invalid_argument on conflicting-sign overlap or
  /// lo >= hi.
  void normalize();
};

/// Sparse constraint row c . x >= 0 over consecutive grid entries.
struct SparseRow {
  int first = 0;
  std::vector<double> coef;

  double dot(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) s += coef[j] * x[first + j];
    return s;
  }
};

struct QpSolution {
  std::vector<double> values;
  std::vector<int> active_set;        // indices of binding rows
  std::vector<double> multipliers;    // matching active_set
  double kkt_residual = 0.0;          // max of stationarity/feasibility defects
  int iterations = 0;
  std::vector<double> objective_trace;
  bool converged = false;
};

/// Thrown when the iteration cap is hit or anti-cycling fails; carries the
/// best iterate found.
struct QpFailure : std::runtime_error {
  QpFailure(const std::string& what, QpSolution best_iterate)
      : std::runtime_error(what), best(std::move(best_iterate)) {}
  QpSolution best;
};

struct QpOptions {
  int max_iterations = 0;     // 0 -> 10 * #rows + 100
  double feas_tol = 1e-9;     // absolute, rows should be O(1)-normalized
  double kkt_tol = 1e-8;      // relative stationarity
};

/// Primal active-set solver for
///   min (1/2) x^T Q x - b^T x   s.t.  c_r . x >= 0 for every row,
/// with banded SPD Q. Starts from the unconstrained minimizer when feasible,
/// otherwise from x = 0 with the rows violated by the unconstrained minimizer
/// as the initial working set. Equality subproblems go through the Schur
/// complement C_W Q^{-1} C_W^T with an incrementally updated dense Cholesky;
/// cycling triggers a Bland-rule fallback. Returns a KKT-certified solution.
QpSolution active_set_qp(const SymBandMatrix& q, std::span<const double> b,
                         const std::vector<SparseRow>& rows,
                         const QpOptions& options = {});

struct ConstrainedFit {
  SplineFit fit;
  QpSolution qp;
};

/// Sign-constrained smoothing spline: same discretized objective as
/// fit_spline subject to sign * (D_d f) >= 0 at every difference node inside
/// each constraint interval. The responses are rescaled to unit variance for
/// the solve (the constraints are homogeneous), so the QP tolerances act on
/// a standardized problem.
ConstrainedFit fit_constrained(const SampleSet& samples, const SplineConfig& config,
                               const ConstraintSpec& constraints);

/// The constraint rows fit_constrained would impose (exposed for tests and
/// diagnostics). Each row is normalized to unit max coefficient.
std::vector<SparseRow> constraint_rows(const SplineSystem& sys,
                                       const ConstraintSpec& constraints);

}  // namespace pcfit

#endif
