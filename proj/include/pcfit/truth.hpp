#ifndef PCFIT_TRUTH_HPP
#define PCFIT_TRUTH_HPP

#include <functional>
#include <string>
#include <vector>

namespace pcfit {

/// Test functions with analytic derivatives and change points, used by the
/// simulation harness as ground truth.
class TruthFunction {
 public:
  /// sin(2 pi freq t)
  static TruthFunction sine(double freq);
  /// (t - 1/2)^3: one convexity change at 1/2, monotone
  static TruthFunction cubic();
  /// C^1 piecewise quadratic whose first derivative crosses zero exactly at
  /// the given interior breaks (alternating extrema)
  static TruthFunction piecewise_poly(std::vector<double> breaks);
  /// logistic 1/(1 + exp(-slope (t - center))): monotone, one inflection
  static TruthFunction monotone_logistic(double slope = 10.0, double center = 0.5);

  static TruthFunction by_name(const std::string& name, double freq = 1.0);

  double operator()(double t) const { return eval(0, t); }
  double eval(int j, double t) const { return eval_(j, t); }

  /// Sign changes of f^{(ell)} in the open interval (0,1).
  std::vector<double> change_points(int ell) const { return cps_(ell); }

  const std::string& name() const { return name_; }

 private:
  TruthFunction(std::string name, std::function<double(int, double)> eval,
                std::function<std::vector<double>(int)> cps)
      : name_(std::move(name)), eval_(std::move(eval)), cps_(std::move(cps)) {}

  std::string name_;
  std::function<double(int, double)> eval_;
  std::function<std::vector<double>(int)> cps_;
};

}  // namespace pcfit

#endif
