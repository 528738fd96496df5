#ifndef PCFIT_BANDED_HPP
#define PCFIT_BANDED_HPP

#include <span>
#include <stdexcept>
#include <vector>

namespace pcfit {

struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Symmetric banded matrix, lower-triangle storage: entry (i+d, i) lives at
/// diag(d)[i] for 0 <= d <= bandwidth.
class SymBandMatrix {
 public:
  SymBandMatrix(int n, int bandwidth);

  int size() const { return n_; }
  int bandwidth() const { return bw_; }

  double get(int i, int j) const;        // zero outside the band
  void add(int i, int j, double v);      // |i-j| must be within the band
  void set(int i, int j, double v);

  std::vector<double> multiply(std::span<const double> x) const;

  /// max |diagonal entry|
  double diag_scale() const;

 private:
  int n_, bw_;
  std::vector<double> data_;  // (bw+1) x n, diagonal-major
  friend class BandCholesky;
};

/// Cholesky factorization A = L L^T of a banded SPD matrix. Throws
/// ConditioningError if a pivot collapses.
class BandCholesky {
 public:
  explicit BandCholesky(const SymBandMatrix& a);

  std::vector<double> solve(std::span<const double> rhs) const;

  /// Band of the inverse, same bandwidth as A, via the sparse-inverse subset
  /// recursion running on the factor. Exact; O(n * bw^2).
  SymBandMatrix inverse_band() const;

 private:
  int n_, bw_;
  std::vector<double> l_;  // same diagonal-major layout as SymBandMatrix
  double lget(int i, int j) const { return l_[(i - j) * n_ + j]; }
};

/// trace(Z * B) where Z is (the band of) a symmetric matrix and B a symmetric
/// banded matrix with bandwidth <= Z's. Exact when the true Z is the inverse
/// of a matrix whose Cholesky factor has Z's bandwidth.
double band_trace_product(const SymBandMatrix& z, const SymBandMatrix& b);

}  // namespace pcfit

#endif
