#ifndef PCFIT_POLY_HPP
#define PCFIT_POLY_HPP

#include <span>
#include <vector>

namespace pcfit {

/// Dense univariate polynomial, coefficients in ascending powers.
/// All algebra is exact in double arithmetic (no quadrature involved), which
/// is what the kernel-norm computations rely on.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs);

  /// (1 - s^2)^p expanded by the binomial theorem.
  static Polynomial one_minus_s2_pow(int p);

  double operator()(double s) const;  // Horner evaluation
  Polynomial derivative() const;
  Polynomial antiderivative() const;  // constant term 0
  Polynomial times(const Polynomial& other) const;
  Polynomial scaled(double c) const;
  double integrate(double a, double b) const;

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/// Least-squares polynomial of the given degree through (t, y); normal
/// equations with a 1e-12 ridge so duplicate abscissae do not break the
/// solve. Returns ascending coefficients.
std::vector<double> polyfit(std::span<const double> t, std::span<const double> y,
                            int degree);

double polyval(std::span<const double> coeffs, double t);

/// Coefficients of the j-th derivative of an ascending-coefficient polynomial.
std::vector<double> polyderiv(std::span<const double> coeffs, int j);

}  // namespace pcfit

#endif
