#include "pcfit/banded.hpp"

#include <algorithm>
#include <cmath>

namespace pcfit {

SymBandMatrix::SymBandMatrix(int n, int bandwidth) : n_(n), bw_(bandwidth) {
  if (n < 1 || bandwidth < 0 || bandwidth >= n)
    throw std::invalid_argument("SymBandMatrix: bad shape");
  data_.assign(static_cast<std::size_t>(bw_ + 1) * n_, 0.0);
}

double SymBandMatrix::get(int i, int j) const {
  if (i < j) std::swap(i, j);
  int d = i - j;
  if (d > bw_) return 0.0;
  return data_[static_cast<std::size_t>(d) * n_ + j];
}

void SymBandMatrix::add(int i, int j, double v) {
  if (i < j) std::swap(i, j);
  int d = i - j;
  if (d > bw_) throw std::invalid_argument("SymBandMatrix::add: outside band");
  data_[static_cast<std::size_t>(d) * n_ + j] += v;
}

void SymBandMatrix::set(int i, int j, double v) {
  if (i < j) std::swap(i, j);
  int d = i - j;
  if (d > bw_) throw std::invalid_argument("SymBandMatrix::set: outside band");
  data_[static_cast<std::size_t>(d) * n_ + j] = v;
}

std::vector<double> SymBandMatrix::multiply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("SymBandMatrix::multiply: size mismatch");
  std::vector<double> y(n_, 0.0);
  for (int j = 0; j < n_; ++j) {
    y[j] += data_[j] * x[j];  // diagonal
    int top = std::min(bw_, n_ - 1 - j);
    for (int d = 1; d <= top; ++d) {
      double v = data_[static_cast<std::size_t>(d) * n_ + j];
      y[j + d] += v * x[j];
      y[j] += v * x[j + d];
    }
  }
  return y;
}

double SymBandMatrix::diag_scale() const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s = std::max(s, std::abs(data_[j]));
  return s;
}

BandCholesky::BandCholesky(const SymBandMatrix& a) : n_(a.n_), bw_(a.bw_) {
  l_ = a.data_;
  for (int k = 0; k < n_; ++k) {
    double pivot = l_[k];
    for (int j = std::max(0, k - bw_); j < k; ++j) {
      double v = lget(k, j);
      pivot -= v * v;
    }
    // strict positivity only: spline systems are strongly graded, so pivots
    // legitimately span many orders of magnitude
    if (!(pivot > 0.0) || !std::isfinite(pivot))
      throw ConditioningError("banded Cholesky: matrix not positive definite");
    double d = std::sqrt(pivot);
    l_[k] = d;
    int top = std::min(bw_, n_ - 1 - k);
    for (int i = k + 1; i <= k + top; ++i) {
      double v = l_[static_cast<std::size_t>(i - k) * n_ + k];
      for (int j = std::max(0, i - bw_); j < k; ++j) v -= lget(i, j) * lget(k, j);
      l_[static_cast<std::size_t>(i - k) * n_ + k] = v / d;
    }
  }
}

std::vector<double> BandCholesky::solve(std::span<const double> rhs) const {
  if (static_cast<int>(rhs.size()) != n_)
    throw std::invalid_argument("BandCholesky::solve: size mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  for (int i = 0; i < n_; ++i) {
    double v = x[i];
    for (int j = std::max(0, i - bw_); j < i; ++j) v -= lget(i, j) * x[j];
    x[i] = v / lget(i, i);
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double v = x[i];
    int top = std::min(bw_, n_ - 1 - i);
    for (int j = i + 1; j <= i + top; ++j) v -= lget(j, i) * x[j];
    x[i] = v / lget(i, i);
  }
  return x;
}

SymBandMatrix BandCholesky::inverse_band() const {
  // Subset recursion on A = L~ D L~^T with unit L~: within the band,
  //   Z_ii = 1/d_i - sum_k L~_ki Z_ki,
  //   Z_ij = -sum_k L~_ki Z_kj   (j > i),
  // running backward over rows; every referenced Z entry stays in the band.
  SymBandMatrix z(n_, bw_);
  auto zref = [&](int i, int j) -> double { return z.get(i, j); };
  for (int i = n_ - 1; i >= 0; --i) {
    double di = lget(i, i) * lget(i, i);
    int top = std::min(bw_, n_ - 1 - i);
    for (int j = i + top; j >= i; --j) {
      double acc = (i == j) ? 1.0 / di : 0.0;
      for (int k = i + 1; k <= i + top; ++k) {
        double lki = lget(k, i) / lget(i, i);  // unit-lower factor entry
        acc -= lki * zref(k, j);
      }
      z.set(i, j, acc);
    }
  }
  return z;
}

double band_trace_product(const SymBandMatrix& z, const SymBandMatrix& b) {
  if (z.size() != b.size() || b.bandwidth() > z.bandwidth())
    throw std::invalid_argument("band_trace_product: incompatible shapes");
  const int n = z.size();
  double tr = 0.0;
  for (int i = 0; i < n; ++i) {
    tr += z.get(i, i) * b.get(i, i);
    int top = std::min(b.bandwidth(), n - 1 - i);
    for (int d = 1; d <= top; ++d) tr += 2.0 * z.get(i + d, i) * b.get(i + d, i);
  }
  return tr;
}

}  // namespace pcfit
