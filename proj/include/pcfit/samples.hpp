#ifndef PCFIT_SAMPLES_HPP
#define PCFIT_SAMPLES_HPP

#include <cmath>
#include <vector>

namespace pcfit {

/// Ordered measurement set on [0,1]: locations t (ascending), responses y,
/// and the noise standard deviation when known (NaN otherwise).
struct SampleSet {
  std::vector<double> t;
  std::vector<double> y;
  double sigma = std::numeric_limits<double>::quiet_NaN();

  int size() const { return static_cast<int>(t.size()); }

  /// Throws std::invalid_argument unless t is ascending inside [0,1] and
  /// sizes match.
  void validate() const;
};

/// sigma if recorded; otherwise the first-difference estimate
/// sqrt(sum (y_{i+1}-y_i)^2 / (2(N-1))).
double noise_sd(const SampleSet& samples);

}  // namespace pcfit

#endif
