#include "pcfit/poly.hpp"

#include <cmath>
#include <stdexcept>

#include "pcfit/math_util.hpp"

namespace pcfit {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Polynomial Polynomial::one_minus_s2_pow(int p) {
  if (p < 0) throw std::invalid_argument("one_minus_s2_pow: negative power");
  std::vector<double> c(2 * p + 1, 0.0);
  double binom = 1.0;
  for (int k = 0; k <= p; ++k) {
    c[2 * k] = (k % 2 ? -binom : binom);
    binom = binom * (p - k) / (k + 1);
  }
  return Polynomial(std::move(c));
}

double Polynomial::operator()(double s) const {
  double v = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * s + *it;
  return v;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial();
  std::vector<double> c(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    c[k - 1] = coeffs_[k] * static_cast<double>(k);
  return Polynomial(std::move(c));
}

Polynomial Polynomial::antiderivative() const {
  std::vector<double> c(coeffs_.size() + 1, 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k)
    c[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
  return Polynomial(std::move(c));
}

Polynomial Polynomial::times(const Polynomial& other) const {
  std::vector<double> c(coeffs_.size() + other.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j)
      c[i + j] += coeffs_[i] * other.coeffs_[j];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::scaled(double c) const {
  std::vector<double> out(coeffs_);
  for (double& v : out) v *= c;
  return Polynomial(std::move(out));
}

double Polynomial::integrate(double a, double b) const {
  Polynomial f = antiderivative();
  return f(b) - f(a);
}

std::vector<double> polyfit(std::span<const double> t, std::span<const double> y,
                            int degree) {
  if (t.size() != y.size() || t.empty())
    throw std::invalid_argument("polyfit: bad input sizes");
  if (degree < 0 || static_cast<std::size_t>(degree) >= t.size())
    throw std::invalid_argument("polyfit: degree too high for sample size");
  const int p = degree + 1;
  std::vector<std::vector<double>> ata(p, std::vector<double>(p, 0.0));
  std::vector<double> atb(p, 0.0);
  std::vector<double> pow(p);
  for (std::size_t i = 0; i < t.size(); ++i) {
    pow[0] = 1.0;
    for (int k = 1; k < p; ++k) pow[k] = pow[k - 1] * t[i];
    for (int r = 0; r < p; ++r) {
      atb[r] += pow[r] * y[i];
      for (int c = 0; c <= r; ++c) ata[r][c] += pow[r] * pow[c];
    }
  }
  for (int r = 0; r < p; ++r) {
    for (int c = r + 1; c < p; ++c) ata[r][c] = ata[c][r];
    ata[r][r] += 1e-12;  // ridge against rank deficiency
  }
  return solve_spd_dense(std::move(ata), std::move(atb));
}

double polyval(std::span<const double> coeffs, double t) {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) v = v * t + coeffs[k];
  return v;
}

std::vector<double> polyderiv(std::span<const double> coeffs, int j) {
  std::vector<double> c(coeffs.begin(), coeffs.end());
  for (int pass = 0; pass < j; ++pass) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
    c = std::move(d);
  }
  return c;
}

}  // namespace pcfit
