#include "pcfit/changepoints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pcfit/math_util.hpp"
#include "pcfit/normal.hpp"

namespace pcfit {

ChangePointReport extract_change_points(const KernelFit& fit) {
  if (fit.values_ell.size() != fit.grid.size() || fit.grid.size() < 2)
    throw std::invalid_argument("extract_change_points: fit lacks values_ell on a grid");
  const double h = fit.bandwidth;
  double max_spacing = 0.0;
  for (std::size_t i = 0; i + 1 < fit.grid.size(); ++i)
    max_spacing = std::max(max_spacing, fit.grid[i + 1] - fit.grid[i]);
  if (!(max_spacing < h / 4.0))
    throw std::invalid_argument("extract_change_points: grid too coarse relative to h");

  const auto& v = fit.values_ell;
  const auto n = v.size();

  // Effective signs: exact zeros inherit the next nonzero sign (ties resolve
  // to the following interval); trailing zeros inherit the previous sign.
  std::vector<int> sign(n, 0);
  int pending_from = -1;
  int last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] > 0.0)
      last = 1;
    else if (v[i] < 0.0)
      last = -1;
    else {
      if (pending_from < 0) pending_from = static_cast<int>(i);
      continue;
    }
    if (pending_from >= 0) {
      for (int k = pending_from; k < static_cast<int>(i); ++k) sign[k] = last;
      pending_from = -1;
    }
    sign[i] = last;
  }
  if (pending_from >= 0)
    for (int k = pending_from; k < static_cast<int>(n); ++k) sign[k] = last;

  ChangePointReport report;
  if (last == 0) return report;  // identically zero input

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (sign[i] == sign[i + 1]) continue;
    ChangePoint cp;
    cp.sign_flip = sign[i + 1] > sign[i] ? 1 : -1;
    if (v[i] == 0.0) {
      cp.x_hat = fit.grid[i];
    } else if (v[i + 1] == 0.0) {
      cp.x_hat = fit.grid[i + 1];
    } else {
      double a = v[i] / (v[i] - v[i + 1]);
      cp.x_hat = fit.grid[i] + a * (fit.grid[i + 1] - fit.grid[i]);
    }
    report.points.push_back(cp);
  }

  // Cluster crossings within 2h of each other.
  const double radius = 2.0 * h;
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    if (report.clusters.empty() ||
        report.points[i].x_hat - report.points[report.clusters.back().members.back()].x_hat >
            radius) {
      report.clusters.push_back({});
    }
    report.clusters.back().members.push_back(static_cast<int>(i));
    report.points[i].cluster_id = static_cast<int>(report.clusters.size()) - 1;
  }
  for (auto& c : report.clusters) {
    c.odd = (c.members.size() % 2) == 1;
    c.span.lo = report.points[c.members.front()].x_hat;
    c.span.hi = report.points[c.members.back()].x_hat;
    if (c.odd) {
      c.representative = c.members[c.members.size() / 2];
      ++report.count;
    }
  }
  return report;
}

double h_function(double z) {
  if (!(z > 0.0)) throw std::domain_error("h_function: z must be positive");
  // Phi(z) - 1 written through erfc directly; the naive form loses the tail
  // to rounding once Phi(z) ~ 1.
  return normal_pdf(z) / z - 0.5 * std::erfc(z / 1.4142135623730950488);
}

double sigma_if(double deriv_at_x, double x, const DesignDistribution& dist,
                const KernelSpec& kernel, double h, int n, double sigma) {
  if (deriv_at_x == 0.0)
    throw std::invalid_argument("sigma_if: zero f^{(l+1)} at the change point");
  if (!(h > 0 && h < 0.5) || n < 1) throw std::invalid_argument("sigma_if: bad h or n");
  const int ell = kernel.order();
  double denom = std::abs(deriv_at_x) *
                 std::sqrt(n * dist.density(x) * std::pow(h, 2 * ell + 1));
  return sigma * kernel.norm(ell) / denom;
}

double expected_false_changepoints(const ChangePointTruth& truth,
                                   const DesignDistribution& dist,
                                   const KernelSpec& kernel, double h, int n,
                                   double sigma) {
  if (truth.locations.size() != truth.deriv_values.size())
    throw std::invalid_argument("expected_false_changepoints: truth size mismatch");
  if (!(sigma > 0)) throw std::invalid_argument("expected_false_changepoints: sigma <= 0");
  const int ell = kernel.order();
  double total = 0.0;
  for (std::size_t k = 0; k < truth.locations.size(); ++k) {
    double fp1 = truth.deriv_values[k];
    if (fp1 == 0.0)
      throw std::invalid_argument("expected_false_changepoints: zero f^{(l+1)}");
    double z = std::sqrt(fp1 * fp1 * n * dist.density(truth.locations[k]) *
                         std::pow(h, 2 * ell + 3) /
                         (sigma * sigma * kernel.norm_sq(ell + 1)));
    total += h_function(z);
  }
  return 2.0 * total;
}

double false_cp_prob_bound(const ChangePointTruth& truth, const DesignDistribution& dist,
                           const KernelSpec& kernel, double h, int n, double sigma,
                           double width) {
  if (!(width > h))
    throw std::invalid_argument("false_cp_prob_bound: requires h/width < 1");
  const int ell = kernel.order();
  if (!(width * width * n * std::pow(h, 2 * ell + 1) >= 1.0))
    throw std::invalid_argument("false_cp_prob_bound: width^2 N h^{2l+1} < 1");
  double total = 0.0;
  for (std::size_t k = 0; k < truth.locations.size(); ++k) {
    double s = sigma_if(truth.deriv_values[k], truth.locations[k], dist, kernel, h, n,
                        sigma);
    total += (s / h) * std::exp(-width * width / (2.0 * s * s));
  }
  return total;
}

Interval uncertainty_interval(double x_hat, double sigma_if_hat, double alpha,
                              const KernelSpec& kernel, double h) {
  if (!(alpha > 0 && alpha < 1))
    throw std::domain_error("uncertainty_interval: alpha outside (0,1)");
  if (!(sigma_if_hat > 0))
    throw std::invalid_argument("uncertainty_interval: sigma_if must be positive");
  const int ell = kernel.order();
  double arg = h * kernel.norm(ell) / (sigma_if_hat * kernel.norm(ell + 1));
  double corrected = alpha * (1.0 + 2.0 * h_function(arg));
  if (corrected >= 1.0)
    throw std::domain_error("uncertainty_interval: corrected level degenerate (>= 1)");
  corrected = std::min(corrected, 0.5);
  double z = two_sided_z(corrected);
  return {x_hat - z * sigma_if_hat, x_hat + z * sigma_if_hat};
}

void annotate_change_points(ChangePointReport& report, const KernelFit& fit,
                            const DesignDistribution& dist, const KernelSpec& kernel,
                            double h, int n, double sigma, double alpha) {
  if (fit.values_ell1.size() != fit.grid.size())
    throw std::invalid_argument("annotate_change_points: fit lacks values_ell1");
  double scale = 0.0;
  for (double v : fit.values_ell1) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;
  for (auto& cp : report.points) {
    double d = fit.eval_ell1(cp.x_hat);
    // A crossing of f^{(l)} with f^{(l+1)} ~ 0 is nongeneric; floor the
    // plug-in slope so the annotation stays finite.
    if (std::abs(d) < 1e-8 * scale) d = std::copysign(1e-8 * scale, d == 0.0 ? 1.0 : d);
    cp.sigma_if_hat = sigma_if(d, cp.x_hat, dist, kernel, h, n, sigma);
    try {
      cp.uncertainty = uncertainty_interval(cp.x_hat, cp.sigma_if_hat, alpha, kernel, h);
    } catch (const std::domain_error&) {
      // weak crossings can push the corrected level past one; report the
      // widest admissible interval (level one half) instead of failing
      double z = two_sided_z(0.5);
      cp.uncertainty = {cp.x_hat - z * cp.sigma_if_hat, cp.x_hat + z * cp.sigma_if_hat};
    }
  }
}

}  // namespace pcfit
