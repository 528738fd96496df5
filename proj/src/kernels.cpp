#include "pcfit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pcfit/math_util.hpp"

namespace pcfit {

KernelSpec KernelSpec::make(int ell) {
  if (ell < 0) throw std::invalid_argument("make_kernel: negative order");
  if (ell > kMaxOrder)
    throw std::invalid_argument("make_kernel: unsupported order (max 4)");
  KernelSpec k;
  k.ell_ = ell;
  Polynomial base = Polynomial::one_minus_s2_pow(ell + 1);
  double mass = base.integrate(-1.0, 1.0);
  Polynomial kappa = base.scaled(1.0 / mass);
  k.derivs_.push_back(kappa);
  for (int j = 1; j <= ell + 1; ++j) k.derivs_.push_back(k.derivs_.back().derivative());
  k.norm_sq_.resize(ell + 2);
  for (int j = 0; j <= ell + 1; ++j)
    k.norm_sq_[j] = k.derivs_[j].times(k.derivs_[j]).integrate(-1.0, 1.0);
  return k;
}

double KernelSpec::value(int j, double s) const {
  if (j < 0 || j >= static_cast<int>(derivs_.size()))
    throw std::invalid_argument("KernelSpec::value: derivative order out of range");
  if (s < -1.0 || s > 1.0) return 0.0;
  return derivs_[j](s);
}

double KernelSpec::norm_sq(int j) const {
  if (j < 0 || j >= static_cast<int>(norm_sq_.size()))
    throw std::invalid_argument("KernelSpec::norm_sq: order out of range");
  return norm_sq_[j];
}

double KernelSpec::norm(int j) const { return std::sqrt(norm_sq(j)); }

double KernelFit::eval_ell(double t) const {
  return interp_sorted(grid, values_ell, t);
}

double KernelFit::eval_ell1(double t) const {
  return interp_sorted(grid, values_ell1, t);
}

namespace {

// Gap lengths in F-scale: cell edges at midpoints of consecutive F(t_i),
// pinned to 0 and 1 at the ends. Sums to one, so the induced weights
// w_i = N F'(t_i) gap_i stay within O(D*/h) of one.
std::vector<double> f_scale_gaps(const SampleSet& s, const DesignDistribution& dist) {
  const auto n = s.t.size();
  std::vector<double> cdf(n);
  for (std::size_t i = 0; i < n; ++i) cdf[i] = dist.cdf(s.t[i]);
  std::vector<double> gaps(n);
  double prev_edge = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double edge = (i + 1 < n) ? 0.5 * (cdf[i] + cdf[i + 1]) : 1.0;
    gaps[i] = edge - prev_edge;
    prev_edge = edge;
  }
  return gaps;
}

// Core gap-weighted sum: (1/h^{j+1}) sum_i y_i gap_i kappa^{(j)}((t-t_i)/h).
std::vector<double> gm_raw(const SampleSet& samples, std::span<const double> gaps,
                           const KernelSpec& kernel, int j, double h,
                           std::span<const double> grid) {
  const double inv_h = 1.0 / h;
  const double scale = std::pow(inv_h, j + 1);
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    auto lo = std::lower_bound(samples.t.begin(), samples.t.end(), t - h);
    auto hi = std::upper_bound(samples.t.begin(), samples.t.end(), t + h);
    if (hi - lo < 2)
      throw std::runtime_error(
          "gm_estimate: degenerate bandwidth (fewer than 2 samples per window)");
    CompensatedSum acc;
    for (auto it = lo; it != hi; ++it) {
      auto i = static_cast<std::size_t>(it - samples.t.begin());
      acc.add(samples.y[i] * gaps[i] * kernel.value(j, (t - samples.t[i]) * inv_h));
    }
    out[g] = acc.value() * scale;
  }
  return out;
}

void check_gm_inputs(const SampleSet& samples, const KernelSpec& kernel, double h,
                     int deriv, std::span<const double> grid) {
  samples.validate();
  if (!(h > 0.0 && h < 0.5))
    throw std::invalid_argument("gm_estimate: bandwidth outside (0, 1/2)");
  if (deriv != kernel.order() && deriv != kernel.order() + 1)
    throw std::invalid_argument("gm_estimate: deriv must be ell or ell+1");
  for (double t : grid)
    if (t < h - 1e-12 || t > 1.0 - h + 1e-12)
      throw std::invalid_argument("gm_estimate: grid point outside [h, 1-h]");
}

}  // namespace

std::vector<double> gm_curve(const SampleSet& samples, const DesignDistribution& dist,
                             const KernelSpec& kernel, double h, int deriv,
                             std::span<const double> grid) {
  check_gm_inputs(samples, kernel, h, deriv, grid);
  return gm_raw(samples, f_scale_gaps(samples, dist), kernel, deriv, h, grid);
}

KernelFit gm_estimate(const SampleSet& samples, const DesignDistribution& dist,
                      const KernelSpec& kernel, double h, int deriv,
                      std::span<const double> grid) {
  KernelFit fit;
  fit.grid.assign(grid.begin(), grid.end());
  fit.bandwidth = h;
  fit.ell = kernel.order();
  auto values = gm_curve(samples, dist, kernel, h, deriv, grid);
  if (deriv == kernel.order())
    fit.values_ell = std::move(values);
  else
    fit.values_ell1 = std::move(values);
  return fit;
}

KernelFit gm_estimate_pair(const SampleSet& samples, const DesignDistribution& dist,
                           const KernelSpec& kernel, double h,
                           std::span<const double> grid) {
  check_gm_inputs(samples, kernel, h, kernel.order(), grid);
  const std::vector<double> gaps = f_scale_gaps(samples, dist);
  KernelFit fit;
  fit.grid.assign(grid.begin(), grid.end());
  fit.bandwidth = h;
  fit.ell = kernel.order();
  fit.values_ell = gm_raw(samples, gaps, kernel, kernel.order(), h, grid);
  fit.values_ell1 = gm_raw(samples, gaps, kernel, kernel.order() + 1, h, grid);
  return fit;
}

KernelMoments kernel_moments(const DesignDistribution& dist, const KernelSpec& kernel,
                             double h, int n, double sigma,
                             std::span<const double> grid, double d_star) {
  if (!(h > 0.0 && h < 0.5)) throw std::invalid_argument("kernel_moments: bad bandwidth");
  if (n < 1) throw std::invalid_argument("kernel_moments: bad n");
  if (d_star < 0) d_star = 0.5 / n;
  const int ell = kernel.order();
  KernelMoments m;
  m.grid.assign(grid.begin(), grid.end());
  m.sigma2.resize(grid.size());
  m.xi2.resize(grid.size());
  const double s2 = sigma * sigma;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double fp = dist.density(grid[i]);
    m.sigma2[i] = s2 * kernel.norm_sq(ell) / (n * fp * std::pow(h, 2 * ell + 1));
    m.xi2[i] = s2 * kernel.norm_sq(ell + 1) / (n * fp * std::pow(h, 2 * ell + 3));
  }
  m.mu = std::sqrt(h + d_star / h);
  return m;
}

std::vector<double> interior_grid(double h, int count) {
  if (count < 2) throw std::invalid_argument("interior_grid: count < 2");
  if (!(h > 0 && h < 0.5)) throw std::invalid_argument("interior_grid: bad h");
  std::vector<double> g(count);
  const double lo = h, hi = 1.0 - h;
  for (int i = 0; i < count; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return g;
}

std::vector<double> default_bandwidth_grid(int n) {
  double lo = std::max(0.02, 8.0 / n);
  double hi = 0.35;
  if (lo >= hi) lo = hi / 4;
  return logspace(lo, hi, 10);
}

BandwidthScan select_bandwidth_gcv(const SampleSet& samples,
                                   const DesignDistribution& dist,
                                   const KernelSpec& kernel,
                                   std::span<const double> h_grid, double sigma) {
  samples.validate();
  if (h_grid.empty()) throw std::invalid_argument("select_bandwidth_gcv: empty grid");
  if (!(sigma > 0)) throw std::invalid_argument("select_bandwidth_gcv: sigma <= 0");
  const std::vector<double> gaps = f_scale_gaps(samples, dist);
  const double k0 = kernel.at_zero();
  const double s2 = sigma * sigma;

  BandwidthScan scan;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = h_grid.size();
  for (std::size_t gi = 0; gi < h_grid.size(); ++gi) {
    const double h = h_grid[gi];
    if (!(h > 0 && h < 0.5)) continue;
    auto lo = std::lower_bound(samples.t.begin(), samples.t.end(), h);
    auto hi = std::upper_bound(samples.t.begin(), samples.t.end(), 1.0 - h);
    const auto n_int = static_cast<std::size_t>(hi - lo);
    if (n_int < 10) continue;

    std::vector<double> curve_grid = interior_grid(h, 129);
    std::vector<double> curve;
    try {
      curve = gm_raw(samples, gaps, kernel, 0, h, curve_grid);
    } catch (const std::exception&) {
      continue;  // window too thin at this bandwidth
    }

    double rss = 0.0, trace = 0.0;
    const double x0 = curve_grid.front();
    const double dx = curve_grid[1] - curve_grid[0];
    for (auto it = lo; it != hi; ++it) {
      auto i = static_cast<std::size_t>(it - samples.t.begin());
      double fitted = interp_uniform(x0, dx, curve, samples.t[i]);
      double r = samples.y[i] - fitted;
      rss += r * r;
      trace += gaps[i] * k0 / h;  // exact hat diagonal of the gap-weighted smoother
    }
    const double nn = static_cast<double>(n_int);
    if (trace >= nn) continue;
    double sigma_hat2 = rss / (nn * s2);
    double denom = 1.0 - trace / nn;
    double score = sigma_hat2 / (denom * denom);
    scan.curve.push_back({h, score, trace});
    if (score <= best) {
      best = score;
      best_idx = gi;
    }
  }
  if (best_idx == h_grid.size())
    throw std::runtime_error("select_bandwidth_gcv: no admissible bandwidth in grid");
  scan.h_star = h_grid[best_idx];
  scan.clamped = (best_idx == 0 || best_idx + 1 == h_grid.size());
  return scan;
}

}  // namespace pcfit
