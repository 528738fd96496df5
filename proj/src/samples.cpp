#include "pcfit/samples.hpp"

#include <limits>
#include <stdexcept>

namespace pcfit {

void SampleSet::validate() const {
  if (t.size() != y.size()) throw std::invalid_argument("SampleSet: t/y size mismatch");
  if (t.empty()) throw std::invalid_argument("SampleSet: empty");
  double prev = -std::numeric_limits<double>::infinity();
  for (double ti : t) {
    if (!(ti >= 0.0 && ti <= 1.0))
      throw std::invalid_argument("SampleSet: location outside [0,1]");
    if (ti < prev) throw std::invalid_argument("SampleSet: locations not sorted");
    prev = ti;
  }
  for (double yi : y)
    if (!std::isfinite(yi)) throw std::invalid_argument("SampleSet: non-finite response");
}

double noise_sd(const SampleSet& samples) {
  if (std::isfinite(samples.sigma) && samples.sigma > 0) return samples.sigma;
  const auto n = samples.y.size();
  if (n < 2) throw std::invalid_argument("noise_sd: need at least 2 samples");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double d = samples.y[i + 1] - samples.y[i];
    s += d * d;
  }
  return std::sqrt(s / (2.0 * static_cast<double>(n - 1)));
}

}  // namespace pcfit
