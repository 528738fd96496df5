#ifndef PCFIT_PILOT_HPP
#define PCFIT_PILOT_HPP

#include <string>
#include <vector>

#include "pcfit/changepoints.hpp"
#include "pcfit/constrained.hpp"
#include "pcfit/design.hpp"
#include "pcfit/kernels.hpp"
#include "pcfit/samples.hpp"
#include "pcfit/spline.hpp"

namespace pcfit {

enum class WidthRule { sigma_multiple, midpoint, fixed };

struct PilotConfig {
  int ell = 2;
  int m = 0;                  // 0 -> ell + 1
  double first_stage_h = 0.0; // 0 -> auto: inflated GCV bandwidth
  double bandwidth_cap = 0.4;
  WidthRule width_rule = WidthRule::sigma_multiple;
  double width_c = 3.0;       // c_w of the sigma_multiple rule
  double width_fixed = 0.1;   // half-width of the fixed rule
  double alpha = 0.05;
  int center = -1;            // -1 auto (on for ell >= 1), 0 off, 1 on
  double lambda = 0.0;        // 0 -> GCV
  int grid_size = 0;          // 0 -> default_grid_size(N)
  DesignDistribution dist = DesignDistribution::uniform();
  std::vector<double> h_grid;       // empty -> default_bandwidth_grid(N)
  std::vector<double> lambda_grid;  // empty -> default_lambda_grid()
};

struct PilotDiagnostics {
  double h_gcv = 0.0;
  double h_used = 0.0;
  double lambda_used = 0.0;
  double sigma_hat = 0.0;
  bool h_clamped = false;
  bool constrained = false;  // second stage honored its constraints
  bool fallback = false;
  std::string fallback_reason;
  std::vector<double> widths;     // per odd cluster
  std::vector<int> parity_flags;  // per cluster: 1 odd, 0 even
};

struct PilotResult {
  KernelFit first_stage;
  ChangePointReport report;
  ConstraintSpec constraints;
  SplineFit second_stage;
  SplineFit second_stage_unconstrained;  // same lambda, no constraints
  QpSolution qp;
  std::vector<double> centering_poly;  // empty when centering off
  PilotDiagnostics diagnostics;
};

/// min(cap, ln(N) N^{1/(2l+1) - 1/(2l+3)} h_gcv) with cap = 0.4.
double first_stage_bandwidth(int n, int ell, double h_gcv, double cap = 0.4);

struct CenteredSamples {
  SampleSet residual;
  std::vector<double> coefficients;  // ascending, degree <= ell
};

/// Remove the least-squares polynomial of degree ell.
CenteredSamples center_polynomial(const SampleSet& samples, int ell);

/// Constraint intervals from an annotated change-point report: odd clusters
/// get a sign constraint on derivative ell+1 around their representative
/// (width per the configured rule, clipped to midpoints toward neighboring
/// clusters and to the estimation region); even clusters get a sign
/// constraint on derivative ell over their span.
ConstraintSpec constraint_intervals(const ChangePointReport& report,
                                    const KernelFit& fit, const PilotConfig& config,
                                    double h, int n);

/// Two-stage estimator: strongly smoothed change-point detection, then a
/// sign-constrained spline at GCV smoothing. QP failure degrades to the
/// unconstrained fit with diagnostics.fallback set.
PilotResult pilot_fit(const SampleSet& samples, const PilotConfig& config);

}  // namespace pcfit

#endif
