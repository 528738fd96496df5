#ifndef PCFIT_SIMHARNESS_HPP
#define PCFIT_SIMHARNESS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcfit/constrained.hpp"
#include "pcfit/design.hpp"
#include "pcfit/pilot.hpp"
#include "pcfit/samples.hpp"
#include "pcfit/truth.hpp"

namespace pcfit {

enum class DesignKind { equispaced, iid_uniform, analytic_cdf };
enum class EstimatorKind { kernel, spline, pilot, constrained_oracle };

struct LambdaRule {
  enum Kind { fixed, scaled, gcv } kind = gcv;
  double value = 0.0;  // fixed: lambda itself; scaled: lambda = value * N^{-2m/(2m+1)}

  double resolve(int n, int m) const;
};

struct ExperimentConfig {
  std::string truth_name = "sine";
  double freq = 1.0;
  int ell = 1;
  int m = 2;
  std::vector<int> n_list;
  double sigma = 0.3;
  DesignKind design = DesignKind::equispaced;
  int replicates = 100;
  std::uint64_t seed = 1;
  EstimatorKind estimator = EstimatorKind::pilot;
  LambdaRule lambda_rule;
  double kernel_h = 0.0;  // kernel estimator bandwidth; 0 -> GCV scan
  WidthRule width_rule = WidthRule::sigma_multiple;
  double width_c = 3.0;
  double alpha = 0.05;
  bool emit_curves = false;
  int threads = 0;

  TruthFunction truth() const { return TruthFunction::by_name(truth_name, freq); }
  DesignDistribution dist() const;
  std::uint64_t hash() const;
  std::string manifest() const;  // "# pcfit-report config=<hex> key=value ..."
};

/// One aggregate row per sample size.
struct PerN {
  int n = 0;
  int replicates = 0;
  int failures = 0;
  std::array<double, 3> mise{};     // mean ISE for derivative j = 0,1,2 (NaN if n/a)
  std::array<double, 3> mise_se{};  // Monte Carlo standard errors
  double mean_k_hat = 0.0;          // kernel: raw crossings; pilot: odd clusters
  double sd_k_hat = 0.0;
  double predicted_ek = 0.0;        // expected surplus change points (kernel only)
  double misspec_rate = 0.0;        // fraction of replicates with a wrong constraint
  double false_inside_rate = 0.0;   // fraction with >1 crossing inside an interval
  double fallback_rate = 0.0;       // pilot replicates that degraded to unconstrained
  double vnorm_dominance_rate = 0.0;
  double runtime_sec = 0.0;         // not serialized (reports stay byte-identical)
};

struct CurvePoint {
  int n;
  double t, mean, lo, hi;
};

struct SimulationReport {
  std::string manifest;
  std::vector<PerN> rows;
  std::vector<CurvePoint> curves;  // when emit_curves

  std::string to_csv() const;
  std::string curves_csv() const;
};

/// Deterministic sample generation keyed by (seed, n, replicate).
SampleSet generate(const TruthFunction& truth, int n, double sigma, DesignKind design,
                   std::uint64_t seed, int replicate);

SimulationReport run_experiment(const ExperimentConfig& config);

struct RateFit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

/// OLS slope of log(mise_j) on log(N); needs at least 4 sample sizes.
RateFit mise_rate(const SimulationReport& report, int j);

/// True when the (centered) truth satisfies every sign constraint and each
/// change-point interval holds exactly one true change point. `centering`
/// may be empty.
bool constraints_correct(const TruthFunction& truth, int ell,
                         const ConstraintSpec& constraints,
                         const std::vector<double>& centering);

}  // namespace pcfit

#endif
