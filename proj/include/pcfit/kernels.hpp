#ifndef PCFIT_KERNELS_HPP
#define PCFIT_KERNELS_HPP

#include <span>
#include <vector>

#include "pcfit/design.hpp"
#include "pcfit/poly.hpp"
#include "pcfit/samples.hpp"

namespace pcfit {

/// Polynomial kernel kappa(s) = c_l (1 - s^2)^{l+1} on [-1,1] for estimating
/// the l-th derivative: unit mass, odd moments vanish, and
/// kappa^{(j)}(+-1) = 0 for j <= l. Derivative polynomials and squared norms
/// come from exact polynomial algebra.
class KernelSpec {
 public:
  static constexpr int kMaxOrder = 4;

  static KernelSpec make(int ell);

  int order() const { return ell_; }
  /// kappa^{(j)}(s); zero outside [-1,1]. j <= ell+1.
  double value(int j, double s) const;
  /// ||kappa^{(j)}||^2 over [-1,1], j <= ell+1.
  double norm_sq(int j) const;
  double norm(int j) const;
  double at_zero() const { return derivs_[0](0.0); }
  const Polynomial& poly(int j) const { return derivs_.at(j); }

 private:
  KernelSpec() = default;
  int ell_ = 0;
  std::vector<Polynomial> derivs_;   // kappa, kappa', ..., kappa^{(ell+1)}
  std::vector<double> norm_sq_;
};

/// make_kernel of the interface contract.
inline KernelSpec make_kernel(int ell) { return KernelSpec::make(ell); }

/// Kernel-smoother output: derivative estimates on a grid inside [h, 1-h].
struct KernelFit {
  std::vector<double> grid;
  std::vector<double> values_ell;   // estimate of f^{(ell)}
  std::vector<double> values_ell1;  // estimate of f^{(ell+1)} (may be empty)
  double bandwidth = 0.0;
  int ell = 0;

  double eval_ell(double t) const;
  double eval_ell1(double t) const;
};

/// Gap-weighted kernel derivative estimate at the given grid points.
/// deriv must be ell or ell+1; every grid point must lie in [h, 1-h];
/// windows with fewer than two samples raise a degenerate-bandwidth error.
std::vector<double> gm_curve(const SampleSet& samples, const DesignDistribution& dist,
                             const KernelSpec& kernel, double h, int deriv,
                             std::span<const double> grid);

/// KernelFit with the requested derivative slot filled.
KernelFit gm_estimate(const SampleSet& samples, const DesignDistribution& dist,
                      const KernelSpec& kernel, double h, int deriv,
                      std::span<const double> grid);

/// KernelFit with both f^{(ell)} and f^{(ell+1)} filled.
KernelFit gm_estimate_pair(const SampleSet& samples, const DesignDistribution& dist,
                           const KernelSpec& kernel, double h,
                           std::span<const double> grid);

/// Asymptotic variance curves of the derivative estimates, plus the
/// correlation magnitude bound sqrt(h + d_star/h).
struct KernelMoments {
  std::vector<double> grid;
  std::vector<double> sigma2;  // Var f^hat{(ell)}
  std::vector<double> xi2;     // Var f^hat{(ell+1)}
  double mu;
};

KernelMoments kernel_moments(const DesignDistribution& dist, const KernelSpec& kernel,
                             double h, int n, double sigma,
                             std::span<const double> grid, double d_star = -1.0);

/// Uniform grid of `count` points spanning [h, 1-h].
std::vector<double> interior_grid(double h, int count);

/// GCV bandwidth scan for the level-0 smoother: d^I with the exact hat-trace
/// of the gap-weighted smoother restricted to interior points. Fitted values
/// are interpolated from a 129-node curve, which keeps the scan O(N) per
/// bandwidth.
struct BandwidthScan {
  double h_star = 0.0;
  bool clamped = false;
  struct Point {
    double h, score, p_eff;
  };
  std::vector<Point> curve;
};

BandwidthScan select_bandwidth_gcv(const SampleSet& samples,
                                   const DesignDistribution& dist,
                                   const KernelSpec& kernel,
                                   std::span<const double> h_grid, double sigma);

/// Default log-spaced bandwidth grid for the GCV scan.
std::vector<double> default_bandwidth_grid(int n);

}  // namespace pcfit

#endif
