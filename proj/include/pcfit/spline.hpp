#ifndef PCFIT_SPLINE_HPP
#define PCFIT_SPLINE_HPP

#include <span>
#include <vector>

#include "pcfit/banded.hpp"
#include "pcfit/samples.hpp"

namespace pcfit {

struct SplineConfig {
  int m = 2;            // penalty order
  double lambda = 1.0;  // smoothing parameter, > 0
  int grid_size = 0;    // 0 -> default_grid_size(N)
  double sigma = 0.0;   // 0 -> first-difference estimate
};

/// Grid-discretized smoothing-spline fit. deriv[j] holds the j-th scaled
/// finite difference of the fitted values (length G - j, node k at
/// grid[k] + j*dx/2); deriv[0] aliases values.
struct SplineFit {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<std::vector<double>> deriv;
  double p_eff = 0.0;    // trace of the data-space influence matrix
  double rss = 0.0;      // plain residual sum of squares at the data
  double vp_value = 0.0; // attained objective
  double lambda = 0.0;
  int m = 0;

  double step() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }
  double deriv_abscissa(int j, int k) const { return grid[k] + 0.5 * j * step(); }
  double eval(double t) const;
  double eval_deriv(int j, double t) const;
};

/// max(256, 2N) capped at 4096.
int default_grid_size(int n);

/// Shared discretization of the penalized objective
///   (lambda/2) sum q_k (D_m f)_k^2 + (1/(N sigma^2)) sum (y_i - (S f)(t_i))^2
/// with D_m the scaled m-th difference, trapezoidal penalty weights q, and S
/// linear interpolation from the grid to the data abscissae. Built once per
/// (samples, m, G, sigma); lambda enters at assembly time so GCV scans reuse
/// the pieces. Also the source of the constraint rows used by the
/// sign-constrained fit.
class SplineSystem {
 public:
  SplineSystem(const SampleSet& samples, const SplineConfig& config);

  int grid_size() const { return grid_size_; }
  int order() const { return m_; }
  double dx() const { return dx_; }
  double sigma() const { return sigma_; }
  int n() const { return n_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& rhs() const { return b_; }

  /// lambda * D^T Q D + (2/(N sigma^2)) S^T S
  SymBandMatrix assemble(double lambda) const;

  /// True when lambda swamps the data term beyond double precision; the
  /// minimizer is then the penalty-null-space (degree < m polynomial) fit.
  bool huge_lambda(double lambda) const;

  /// Unconstrained minimizer (banded Cholesky, or the polynomial-limit path
  /// when huge_lambda).
  std::vector<double> solve(double lambda) const;

  /// Assemble a SplineFit (derivative curves, rss, objective, exact p_eff)
  /// from grid values.
  SplineFit finish(std::vector<double> values, double lambda) const;

  double penalty_quad(std::span<const double> g) const;  // sum q (D_m g)^2
  double data_sumsq(std::span<const double> g) const;    // sum (S g)(t_i)^2
  double rss(std::span<const double> values) const;

  /// Difference-operator row for derivative order d at difference node k,
  /// scaled to unit max coefficient (sign constraints are scale free).
  /// Node abscissa is grid[k] + d*dx/2.
  struct Row {
    int first;
    std::vector<double> coef;
  };
  Row derivative_row(int d, int k) const;
  int deriv_nodes(int d) const { return grid_size_ - d; }
  double deriv_abscissa(int d, int k) const { return grid_[k] + 0.5 * d * dx_; }

 private:
  int n_, m_, grid_size_;
  double dx_, sigma_;
  std::vector<double> grid_;
  std::vector<int> s_idx_;      // left grid node per data point
  std::vector<double> s_frac_;  // interpolation fraction per data point
  std::vector<double> y_;
  SymBandMatrix penalty_;       // D^T Q D
  SymBandMatrix data_term_;     // (2/(N sigma^2)) S^T S, bandwidth 1
  std::vector<double> b_;       // (2/(N sigma^2)) S^T y
  std::vector<double> stencil_; // D_m binomial coefficients
  std::vector<double> poly_limit_values() const;
};

SplineFit fit_spline(const SampleSet& samples, const SplineConfig& config);

/// Squared V-norm of a grid function:
/// (lambda/2) sum q (D_m g)^2 + (1/(N sigma^2)) sum (S g)(t_i)^2,
/// with the exact operators of fit_spline.
double v_norm(std::span<const double> g, const SampleSet& samples,
              const SplineConfig& config);

struct GcvPoint {
  double lambda, score, p_eff;
};
struct GcvResult {
  double lambda_star = 0.0;
  std::vector<GcvPoint> curve;
  SplineFit best;
};

/// d^I scan over a lambda grid (gamma1 = 1); scores with p >= N are excluded;
/// ties resolve toward larger lambda.
GcvResult gcv_select(const SampleSet& samples, const SplineConfig& config_template,
                     std::span<const double> lambda_grid);

std::vector<double> default_lambda_grid();

}  // namespace pcfit

#endif
