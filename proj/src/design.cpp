#include "pcfit/design.hpp"

#include <cmath>
#include <stdexcept>

#include "pcfit/math_util.hpp"

namespace pcfit {

DesignDistribution DesignDistribution::uniform() {
  DesignDistribution d;
  d.cdf = [](double t) { return t; };
  d.density = [](double) { return 1.0; };
  d.lower_density = 1.0;
  d.upper_density = 1.0;
  d.name = "uniform";
  return d;
}

DesignDistribution DesignDistribution::tilted(double a) {
  if (!(a > -0.5)) throw std::invalid_argument("tilted: need a > -1/2");
  DesignDistribution d;
  d.cdf = [a](double t) { return (t + a * t * t) / (1.0 + a); };
  d.density = [a](double t) { return (1.0 + 2.0 * a * t) / (1.0 + a); };
  d.lower_density = std::min(1.0, 1.0 + 2.0 * a) / (1.0 + a);
  d.upper_density = std::max(1.0, 1.0 + 2.0 * a) / (1.0 + a);
  d.name = "tilted";
  return d;
}

void DesignDistribution::validate() const {
  if (!cdf || !density) throw std::invalid_argument("DesignDistribution: missing maps");
  if (std::abs(cdf(0.0)) > 1e-12 || std::abs(cdf(1.0) - 1.0) > 1e-12)
    throw std::invalid_argument("DesignDistribution: F(0) != 0 or F(1) != 1");
  const int probes = 512;
  double prev = cdf(0.0);
  for (int i = 1; i <= probes; ++i) {
    double t = static_cast<double>(i) / probes;
    double v = cdf(t);
    if (v + 1e-12 < prev)
      throw std::invalid_argument("DesignDistribution: cdf not nondecreasing");
    prev = v;
    double f = density(t);
    if (!(f >= lower_density - 1e-9 && f <= upper_density + 1e-9))
      throw std::invalid_argument("DesignDistribution: density outside [c_F, C_F]");
  }
}

DiscrepancyReport star_discrepancy(std::span<const double> points,
                                   const DesignDistribution& dist) {
  const auto n = points.size();
  if (n == 0) throw std::invalid_argument("star_discrepancy: empty point set");
  double prev = -1.0;
  for (double t : points) {
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("star_discrepancy: point outside [0,1]");
    if (t < prev) throw std::invalid_argument("star_discrepancy: points not sorted");
    prev = t;
  }
  const double nd = static_cast<double>(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dev = std::abs(dist.cdf(points[i]) - (static_cast<double>(i) + 0.5) / nd);
    worst = std::max(worst, dev);
  }
  double max_sp = 0.0, min_sp = 0.0;
  if (n > 1) {
    min_sp = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double sp = points[i + 1] - points[i];
      max_sp = std::max(max_sp, sp);
      min_sp = std::min(min_sp, sp);
    }
  }
  return {0.5 / nd + worst, max_sp, min_sp};
}

KoksmaGap koksma_gap(const BoundedVariationFn& g, std::span<const double> points,
                     std::span<const double> weights, double weight_constant,
                     const DesignDistribution& dist) {
  if (points.size() != weights.size())
    throw std::invalid_argument("koksma_gap: points/weights size mismatch");
  if (!(weight_constant >= 0))
    throw std::invalid_argument("koksma_gap: negative weight constant");
  DiscrepancyReport rep = star_discrepancy(points, dist);
  const double allowed = weight_constant * rep.d_star * (1.0 + 1e-12) + 1e-15;
  for (double w : weights)
    if (std::abs(w - 1.0) > allowed)
      throw std::invalid_argument("koksma_gap: weight deviates beyond C * d_star");

  double integral = integrate_simpson(
      [&](double t) { return g.f(t) * dist.density(t); }, 0.0, 1.0, 1e-12);
  CompensatedSum s;
  for (std::size_t i = 0; i < points.size(); ++i) s.add(g.f(points[i]) * weights[i]);
  double gap = std::abs(integral - s.value() / static_cast<double>(points.size()));
  double bound = (g.tv_norm + weight_constant * g.sup_norm) * rep.d_star;
  return {gap, bound};
}

InterpTerms interp_inequality_terms(
    const std::vector<std::function<double(double)>>& derivs, int m, double theta) {
  if (m < 1) throw std::invalid_argument("interp_inequality_terms: m < 1");
  if (derivs.size() < static_cast<std::size_t>(m) + 1)
    throw std::invalid_argument("interp_inequality_terms: need g^{(0..m)}");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("interp_inequality_terms: theta outside [0,1]");
  InterpTerms out;
  out.lhs.resize(m + 1);
  for (int j = 0; j <= m; ++j) {
    const auto& gj = derivs[j];
    double raw = integrate_simpson([&](double t) { double v = gj(t); return v * v; },
                                   0.0, 1.0, 1e-12);
    out.lhs[j] = std::pow(theta, 2 * j) * raw;
    if (j == 0) out.l2 = raw;
    if (j == m) out.seminorm_m = out.lhs[j];
  }
  return out;
}

}  // namespace pcfit
