#ifndef PCFIT_DESIGN_HPP
#define PCFIT_DESIGN_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pcfit {

/// Limiting distribution of the measurement design: smooth cdf F on [0,1]
/// with density bounded away from zero and infinity.
struct DesignDistribution {
  std::function<double(double)> cdf;
  std::function<double(double)> density;
  double lower_density = 1.0;  // c_F
  double upper_density = 1.0;  // C_F
  std::string name = "uniform";

  static DesignDistribution uniform();
  /// F(t) = (t + a t^2) / (1 + a), density (1 + 2 a t)/(1 + a); a > -1/2.
  static DesignDistribution tilted(double a);

  /// Checks F(0)=0, F(1)=1, monotonicity and the density bounds on a probe
  /// grid. Throws std::invalid_argument on violation.
  void validate() const;
};

struct DiscrepancyReport {
  double d_star;
  double max_spacing;
  double min_spacing;
};

/// Exact star discrepancy of a sorted point set against F, via the
/// breakpoint identity d* = 1/(2N) + max_i |F(t_i) - (i - 1/2)/N|.
DiscrepancyReport star_discrepancy(std::span<const double> points,
                                   const DesignDistribution& dist);

/// A bounded-variation test function with caller-supplied norms.
struct BoundedVariationFn {
  std::function<double(double)> f;
  double tv_norm;
  double sup_norm;
};

struct KoksmaGap {
  double gap;    // |integral of g dF - weighted sample mean|
  double bound;  // (||g||_TV + C ||g||_inf) * d_star
};

/// Quadrature-vs-sum gap and its discrepancy bound. Weights must satisfy
/// |w_i - 1| <= C * d_star.
KoksmaGap koksma_gap(const BoundedVariationFn& g, std::span<const double> points,
                     std::span<const double> weights, double weight_constant,
                     const DesignDistribution& dist);

struct InterpTerms {
  std::vector<double> lhs;  // theta^{2j} * int |g^{(j)}|^2, j = 0..m
  double l2;                // int g^2
  double seminorm_m;        // theta^{2m} * int |g^{(m)}|^2
};

/// Integrals entering the Sobolev interpolation inequality. derivs[j] must
/// evaluate g^{(j)}; derivs.size() must be at least m+1.
InterpTerms interp_inequality_terms(
    const std::vector<std::function<double(double)>>& derivs, int m, double theta);

}  // namespace pcfit

#endif
