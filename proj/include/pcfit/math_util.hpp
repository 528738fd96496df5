#ifndef PCFIT_MATH_UTIL_HPP
#define PCFIT_MATH_UTIL_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace pcfit {

/// Compensated (Kahan) accumulator for long sums with cancellation.
class CompensatedSum {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Composite Simpson quadrature with interval doubling until the estimate
/// stabilizes. Starts at `min_panels` (kept >= 4096 for the design-module
/// integrals) and refines up to `max_panels`.
double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-10, int min_panels = 4096,
                         int max_panels = 1 << 18);

/// n log-spaced values on [lo, hi], inclusive.
std::vector<double> logspace(double lo, double hi, int n);

/// Linear interpolation on a uniform grid starting at x0 with spacing dx.
/// Clamps outside the grid range.
double interp_uniform(double x0, double dx, std::span<const double> values, double x);

/// Linear interpolation on a sorted abscissa vector. Clamps outside.
double interp_sorted(std::span<const double> xs, std::span<const double> ys, double x);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased, n-1

struct OlsLine {
  double slope, intercept, slope_stderr;
};
/// Ordinary least squares y ~ a + b x; needs at least 3 points for the
/// slope standard error.
OlsLine ols_line(std::span<const double> x, std::span<const double> y);

/// Solve a small dense symmetric positive definite system in place.
std::vector<double> solve_spd_dense(std::vector<std::vector<double>> a,
                                    std::vector<double> b);

/// Run fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Results must be written to caller-owned per-index slots so
/// that output is independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

}  // namespace pcfit

#endif
