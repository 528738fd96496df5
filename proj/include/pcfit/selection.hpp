#ifndef PCFIT_SELECTION_HPP
#define PCFIT_SELECTION_HPP

#include <span>
#include <vector>

#include "pcfit/pilot.hpp"
#include "pcfit/samples.hpp"

namespace pcfit {

struct CriterionInput {
  double sigma_hat2 = 0.0;  // (1/(N sigma^2)) sum residual^2
  double p = 0.0;           // effective parameters
  int k = 0;                // change-point count
  int n = 0;
  double gamma1 = 1.0;
  double gamma2 = 2.0;
};

/// sigma_hat^2 / (1 - gamma1 p / N)^2; +inf once gamma1 p >= N.
double criterion_dI(const CriterionInput& in);

/// sigma_hat^2 (1 + gamma2 p ln(N) / N).
double criterion_dB(const CriterionInput& in);

/// sigma_hat^2 (1 + gamma2 K ln(N)/N) / (1 - gamma1 p / N)^2.
double criterion_pcic(const CriterionInput& in);

struct ModelCandidate {
  int k = 0;
  double lambda = 0.0;
  double sigma_hat2 = 0.0;
  double p = 0.0;
  double pcic = 0.0;
  PilotResult result;
};

/// argmin PCIC; ties toward smaller K, then larger lambda.
int select_model(std::span<const ModelCandidate> candidates);

/// Candidate fits over the number of change points: the pilot's detected
/// clusters, then variants with the weakest clusters suppressed (their region
/// constrained to a single sign of f^{(l)}) down to K = 0, and clusters
/// promoted to their individual crossings up to K = kmax when satellites
/// exist.
std::vector<ModelCandidate> search_change_point_models(const SampleSet& samples,
                                                       const PilotConfig& config,
                                                       int kmax);

}  // namespace pcfit

#endif
