#include "pcfit/truth.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "pcfit/poly.hpp"

namespace pcfit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kHalfPi = 1.570796326794896619231322;

// sign changes of sin(2 pi freq t + j pi/2) in (0,1):
// phase = k pi  =>  t = (k - j/2) / (2 freq)
std::vector<double> sine_zeros(double freq, int j) {
  std::vector<double> out;
  int kmax = static_cast<int>(std::ceil(2.0 * freq)) + 8;
  for (int k = -8; k <= kmax; ++k) {
    double t = (static_cast<double>(k) - 0.5 * j) / (2.0 * freq);
    if (t > 1e-12 && t < 1.0 - 1e-12) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TruthFunction TruthFunction::sine(double freq) {
  if (!(freq > 0)) throw std::invalid_argument("sine truth: freq must be positive");
  auto eval = [freq](int j, double t) {
    double amp = std::pow(kTwoPi * freq, j);
    return amp * std::sin(kTwoPi * freq * t + j * kHalfPi);
  };
  auto cps = [freq](int ell) { return sine_zeros(freq, ell); };
  return TruthFunction("sine", eval, cps);
}

TruthFunction TruthFunction::cubic() {
  auto eval = [](int j, double t) {
    double u = t - 0.5;
    switch (j) {
      case 0: return u * u * u;
      case 1: return 3.0 * u * u;
      case 2: return 6.0 * u;
      case 3: return 6.0;
      default: return 0.0;
    }
  };
  auto cps = [](int ell) {
    // f' touches zero without a sign change; only f'' flips
    return ell == 2 ? std::vector<double>{0.5} : std::vector<double>{};
  };
  return TruthFunction("cubic", eval, cps);
}

TruthFunction TruthFunction::piecewise_poly(std::vector<double> breaks) {
  std::sort(breaks.begin(), breaks.end());
  for (double b : breaks)
    if (!(b > 0.0 && b < 1.0))
      throw std::invalid_argument("piecewise_poly: breaks must be interior");
  if (breaks.empty()) throw std::invalid_argument("piecewise_poly: no breaks");
  const int k = static_cast<int>(breaks.size());

  // knots z_0 = 0 < z_1 < ... < z_K = 1 with z_j midway between breaks;
  // on [z_{j-1}, z_j] the derivative is linear and crosses zero at break j.
  std::vector<double> knots(k + 1);
  knots[0] = 0.0;
  knots[k] = 1.0;
  for (int j = 1; j < k; ++j) knots[j] = 0.5 * (breaks[j - 1] + breaks[j]);

  // endpoint magnitudes a_j of f' at the knots, alternating sign, chosen so
  // each linear segment crosses zero exactly at its break
  std::vector<double> mag(k + 1);
  mag[0] = 1.0;
  for (int j = 1; j <= k; ++j)
    mag[j] = mag[j - 1] * (knots[j] - breaks[j - 1]) / (breaks[j - 1] - knots[j - 1]);

  // integrate the piecewise-linear derivative into per-segment quadratics
  // in the local variable (t - z_{j-1})
  struct Segment {
    double z0, c0, c1, c2;  // f = c0 + c1 u + c2 u^2, u = t - z0
  };
  auto segs = std::make_shared<std::vector<Segment>>();
  double f0 = 0.0;
  for (int j = 1; j <= k; ++j) {
    double len = knots[j] - knots[j - 1];
    double d0 = (j % 2 ? 1.0 : -1.0) * mag[j - 1];
    double d1 = (j % 2 ? -1.0 : 1.0) * mag[j];
    double slope = (d1 - d0) / len;
    segs->push_back({knots[j - 1], f0, d0, 0.5 * slope});
    f0 += d0 * len + 0.5 * slope * len * len;
  }

  auto eval = [segs](int j, double t) {
    const auto& s = *segs;
    std::size_t i = 0;
    while (i + 1 < s.size() && t >= s[i + 1].z0) ++i;
    double u = t - s[i].z0;
    switch (j) {
      case 0: return s[i].c0 + s[i].c1 * u + s[i].c2 * u * u;
      case 1: return s[i].c1 + 2.0 * s[i].c2 * u;
      case 2: return 2.0 * s[i].c2;
      default: return 0.0;
    }
  };
  auto breaks_copy = std::make_shared<std::vector<double>>(breaks);
  auto knots_copy = std::make_shared<std::vector<double>>(knots);
  auto cps = [breaks_copy, knots_copy](int ell) {
    if (ell == 1) return *breaks_copy;
    if (ell == 2) {
      // curvature flips at the interior knots
      std::vector<double> out(knots_copy->begin() + 1, knots_copy->end() - 1);
      return out;
    }
    return std::vector<double>{};
  };
  return TruthFunction("piecewise-poly", eval, cps);
}

TruthFunction TruthFunction::monotone_logistic(double slope, double center) {
  if (!(slope > 0)) throw std::invalid_argument("logistic truth: slope must be positive");
  auto eval = [slope, center](int j, double t) {
    double f = 1.0 / (1.0 + std::exp(-slope * (t - center)));
    double g = f * (1.0 - f);
    switch (j) {
      case 0: return f;
      case 1: return slope * g;
      case 2: return slope * slope * g * (1.0 - 2.0 * f);
      case 3: return slope * slope * slope * g * (1.0 - 6.0 * f + 6.0 * f * f);
      default:
        throw std::invalid_argument("logistic truth: derivatives above 3 not provided");
    }
  };
  auto cps = [slope, center](int ell) {
    std::vector<double> out;
    if (ell == 2 && center > 0.0 && center < 1.0) out.push_back(center);
    if (ell == 3) {
      // zeros of 1 - 6f + 6f^2: f = (3 +- sqrt(3))/6
      for (double froot : {(3.0 - std::sqrt(3.0)) / 6.0, (3.0 + std::sqrt(3.0)) / 6.0}) {
        double t = center + std::log(froot / (1.0 - froot)) / slope;
        if (t > 0.0 && t < 1.0) out.push_back(t);
      }
      std::sort(out.begin(), out.end());
    }
    return out;
  };
  return TruthFunction("monotone-logistic", eval, cps);
}

TruthFunction TruthFunction::by_name(const std::string& name, double freq) {
  if (name == "sine") return sine(freq);
  if (name == "cubic") return cubic();
  if (name == "piecewise-poly") return piecewise_poly({1.0 / 3.0, 2.0 / 3.0});
  if (name == "monotone-logistic") return monotone_logistic();
  throw std::invalid_argument("unknown truth function: " + name);
}

}  // namespace pcfit
