#ifndef PCFIT_CHANGEPOINTS_HPP
#define PCFIT_CHANGEPOINTS_HPP

#include <limits>
#include <span>
#include <vector>

#include "pcfit/design.hpp"
#include "pcfit/kernels.hpp"

namespace pcfit {

struct Interval {
  double lo = 0.0, hi = 0.0;
};

struct ChangePoint {
  double x_hat = 0.0;
  int sign_flip = 0;  // +1: - to +, -1: + to -
  double sigma_if_hat = std::numeric_limits<double>::quiet_NaN();
  Interval uncertainty;
  int cluster_id = -1;
};

struct ZeroCluster {
  std::vector<int> members;  // indices into points, ascending
  bool odd = false;
  Interval span;
  int representative = -1;  // index into points; median member for odd clusters
};

/// Sign changes of a derivative estimate, grouped into clusters of nearby
/// zeros. `count` is the number of odd clusters (the change-point estimate
/// K-hat); points.size() is the raw crossing count.
struct ChangePointReport {
  std::vector<ChangePoint> points;
  std::vector<ZeroCluster> clusters;
  int count = 0;

  int total_crossings() const { return static_cast<int>(points.size()); }
};

/// Scan fit.values_ell for sign changes (linear interpolation between grid
/// nodes; exact grid zeros take the sign of the next nonzero value, so ties
/// resolve toward the following interval). Zeros within 2h of each other
/// merge into one cluster; odd clusters get their median crossing as
/// representative. Requires grid spacing < h/4.
ChangePointReport extract_change_points(const KernelFit& fit);

/// H(z) = phi(z)/z + Phi(z) - 1 for z > 0.
double h_function(double z);

/// Change-point standard deviation
/// sigma ||kappa^{(l)}|| / (|f^{(l+1)}(x)| sqrt(N F'(x) h^{2l+1})).
double sigma_if(double deriv_at_x, double x, const DesignDistribution& dist,
                const KernelSpec& kernel, double h, int n, double sigma);

/// Change points of the target function together with f^{(l+1)} there;
/// inputs to the false-change-point formulas.
struct ChangePointTruth {
  std::vector<double> locations;
  std::vector<double> deriv_values;  // f^{(l+1)}(x_k), all nonzero
};

/// Expected surplus of l-change points of the kernel estimate:
/// 2 sum_k H( sqrt(|f^{(l+1)}(x_k)|^2 N F'(x_k) h^{2l+3} / (sigma^2 ||kappa^{(l+1)}||^2)) ).
double expected_false_changepoints(const ChangePointTruth& truth,
                                   const DesignDistribution& dist,
                                   const KernelSpec& kernel, double h, int n,
                                   double sigma);

/// Tail bound on a false change point farther than `width` from every true
/// one: sum_k (sigma_if/h) exp(-width^2 / (2 sigma_if^2)). The unspecified
/// O(.) constant is reported as 1; diagnostic, not certified.
double false_cp_prob_bound(const ChangePointTruth& truth, const DesignDistribution& dist,
                           const KernelSpec& kernel, double h, int n, double sigma,
                           double width);

/// Two-sided interval x_hat +- z * sigma_if at the corrected level
/// alpha [1 + 2 H(h ||kappa^{(l)}|| / (sigma_if ||kappa^{(l+1)}||))],
/// clamped to at most 0.5.
Interval uncertainty_interval(double x_hat, double sigma_if_hat, double alpha,
                              const KernelSpec& kernel, double h);

/// Fill sigma_if_hat (plug-in with the estimated f^{(l+1)} from
/// fit.values_ell1) and the alpha uncertainty interval of every crossing.
void annotate_change_points(ChangePointReport& report, const KernelFit& fit,
                            const DesignDistribution& dist, const KernelSpec& kernel,
                            double h, int n, double sigma, double alpha);

}  // namespace pcfit

#endif
