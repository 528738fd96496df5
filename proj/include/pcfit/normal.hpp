#ifndef PCFIT_NORMAL_HPP
#define PCFIT_NORMAL_HPP

namespace pcfit {

/// Standard normal density.
double normal_pdf(double z);

/// Standard normal cdf via erfc; absolute error well below 1e-12.
double normal_cdf(double z);

/// Inverse standard normal cdf (Acklam's rational approximation polished by
/// one Halley step); p in (0, 1).
double normal_quantile(double p);

/// Two-sided z for a level in (0, 1): P(|Z| > z) = level.
double two_sided_z(double level);

}  // namespace pcfit

#endif
