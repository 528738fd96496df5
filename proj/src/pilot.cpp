#include "pcfit/pilot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pcfit/math_util.hpp"
#include "pcfit/poly.hpp"

namespace pcfit {

double first_stage_bandwidth(int n, int ell, double h_gcv, double cap) {
  if (n < 10) throw std::invalid_argument("first_stage_bandwidth: n < 10");
  if (!(h_gcv > 0 && h_gcv < 0.5))
    throw std::invalid_argument("first_stage_bandwidth: h_gcv outside (0, 1/2)");
  if (ell < 0) throw std::invalid_argument("first_stage_bandwidth: ell < 0");
  double alpha = 1.0 / (2.0 * ell + 1.0) - 1.0 / (2.0 * ell + 3.0);
  return std::min(cap, std::log(static_cast<double>(n)) * std::pow(n, alpha) * h_gcv);
}

CenteredSamples center_polynomial(const SampleSet& samples, int ell) {
  samples.validate();
  if (ell < 0) throw std::invalid_argument("center_polynomial: ell < 0");
  if (samples.size() < ell + 1)
    throw std::invalid_argument("center_polynomial: need N >= ell + 1");
  CenteredSamples out;
  out.coefficients = polyfit(samples.t, samples.y, ell);
  out.residual = samples;
  for (int i = 0; i < samples.size(); ++i)
    out.residual.y[i] -= polyval(out.coefficients, samples.t[i]);
  return out;
}

namespace {

std::vector<double> crossing_locations(std::span<const double> grid,
                                       std::span<const double> values) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    double a = values[i], b = values[i + 1];
    if (a == 0.0 || (a < 0) == (b < 0) || b == 0.0) {
      if (a != 0.0 && b == 0.0 && i + 2 < values.size()) {
        // zero node: crossing only if the next nonzero flips
        std::size_t j = i + 1;
        while (j < values.size() && values[j] == 0.0) ++j;
        if (j < values.size() && (values[j] < 0) != (a < 0)) out.push_back(grid[i + 1]);
      }
      continue;
    }
    out.push_back(grid[i] + (grid[i + 1] - grid[i]) * a / (a - b));
  }
  return out;
}

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

ConstraintSpec constraint_intervals(const ChangePointReport& report,
                                    const KernelFit& fit, const PilotConfig& config,
                                    double h, int n) {
  ConstraintSpec spec;
  if (report.clusters.empty()) return spec;
  if (fit.values_ell.empty())
    throw std::invalid_argument("constraint_intervals: fit lacks values_ell");

  const double lo_edge = fit.grid.front();
  const double hi_edge = fit.grid.back();
  const double spacing = fit.grid.size() > 1 ? fit.grid[1] - fit.grid[0] : 0.0;
  const int ell = config.ell;

  // representative location per cluster (odd: median crossing; even: span mid)
  std::vector<double> rep(report.clusters.size());
  for (std::size_t c = 0; c < report.clusters.size(); ++c) {
    const auto& cl = report.clusters[c];
    rep[c] = cl.odd ? report.points[cl.representative].x_hat
                    : 0.5 * (cl.span.lo + cl.span.hi);
  }

  std::vector<double> ell1_zeros;
  if (config.width_rule == WidthRule::midpoint) {
    if (fit.values_ell1.empty())
      throw std::invalid_argument("constraint_intervals: midpoint rule needs values_ell1");
    ell1_zeros = crossing_locations(fit.grid, fit.values_ell1);
  }

  std::vector<ConstraintInterval> raw;
  for (std::size_t c = 0; c < report.clusters.size(); ++c) {
    const auto& cl = report.clusters[c];
    ConstraintInterval iv;
    if (cl.odd) {
      const ChangePoint& point = report.points[cl.representative];
      const double x = point.x_hat;
      double lo, hi;
      if (config.width_rule == WidthRule::midpoint) {
        double u_prev = lo_edge, u_next = hi_edge;
        for (double z : ell1_zeros) {
          if (z < x) u_prev = std::max(u_prev, z);
          if (z > x && u_next == hi_edge) u_next = std::min(u_next, z);
        }
        lo = 0.5 * (x + u_prev);
        hi = 0.5 * (x + u_next);
      } else {
        double w;
        if (config.width_rule == WidthRule::fixed) {
          w = config.width_fixed;
        } else {
          double s = point.sigma_if_hat;
          if (!(s > 0))
            throw std::invalid_argument(
                "constraint_intervals: sigma rule needs an annotated report");
          w = std::max(config.width_c * s * std::sqrt(2.0 * std::log(double(n))),
                       2.0 * h);
        }
        lo = x - w;
        hi = x + w;
      }
      // clip toward neighboring clusters, then to the estimation region
      if (c > 0) lo = std::max(lo, 0.5 * (x + rep[c - 1]));
      if (c + 1 < report.clusters.size()) hi = std::min(hi, 0.5 * (x + rep[c + 1]));
      lo = std::max(lo, lo_edge);
      hi = std::min(hi, hi_edge);
      if (!(lo < hi)) continue;
      int s = sign_of(fit.eval_ell(hi) - fit.eval_ell(lo));
      if (s == 0) continue;  // flat increment: no usable sign
      iv = {ell + 1, lo, hi, s};
    } else {
      double lo = std::max(lo_edge, cl.span.lo - 0.5 * spacing);
      double hi = std::min(hi_edge, cl.span.hi + 0.5 * spacing);
      if (!(lo < hi)) continue;
      // flank sign: just outside the span the estimate has a single sign
      int s = sign_of(fit.eval_ell(std::max(lo_edge, lo - spacing)));
      if (s == 0) s = sign_of(fit.eval_ell(std::min(hi_edge, hi + spacing)));
      if (s == 0) continue;
      iv = {ell, lo, hi, s};
    }
    raw.push_back(iv);
  }

  // resolve residual overlaps (possible after span padding): same sign
  // merges, conflicting signs split at the overlap midpoint
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    return a.deriv != b.deriv ? a.deriv < b.deriv : a.lo < b.lo;
  });
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    auto& a = raw[i];
    auto& b = raw[i + 1];
    if (a.deriv == b.deriv && b.lo < a.hi) {
      if (a.sign == b.sign) continue;  // normalize() will merge
      double mid = 0.5 * (b.lo + a.hi);
      a.hi = mid;
      b.lo = mid;
    }
  }
  spec.intervals = std::move(raw);
  spec.normalize();
  return spec;
}

PilotResult pilot_fit(const SampleSet& samples, const PilotConfig& config) {
  samples.validate();
  const int n = samples.size();
  if (n < 30) throw std::invalid_argument("pilot_fit: need N >= 30");
  const int ell = config.ell;
  if (ell < 0 || ell > KernelSpec::kMaxOrder)
    throw std::invalid_argument("pilot_fit: unsupported ell");
  const int m = config.m > 0 ? config.m : ell + 1;
  if (m < 2 || m < ell) throw std::invalid_argument("pilot_fit: need m >= max(2, ell)");

  PilotResult result;
  PilotDiagnostics& diag = result.diagnostics;
  diag.sigma_hat = noise_sd(samples);

  const bool do_center = config.center < 0 ? (ell >= 1) : (config.center != 0);
  SampleSet work = samples;
  if (do_center) {
    CenteredSamples centered = center_polynomial(samples, ell);
    work = std::move(centered.residual);
    work.sigma = samples.sigma;
    result.centering_poly = std::move(centered.coefficients);
  }

  const KernelSpec kernel = make_kernel(ell);

  // first-stage bandwidth
  double h1 = config.first_stage_h;
  if (h1 <= 0) {
    std::vector<double> h_grid =
        config.h_grid.empty() ? default_bandwidth_grid(n) : config.h_grid;
    BandwidthScan scan =
        select_bandwidth_gcv(work, config.dist, kernel, h_grid, diag.sigma_hat);
    diag.h_gcv = scan.h_star;
    diag.h_clamped = scan.clamped;
    h1 = first_stage_bandwidth(n, ell, scan.h_star, config.bandwidth_cap);
  }
  diag.h_used = h1;

  // second-stage smoothing
  SplineConfig scfg;
  scfg.m = m;
  scfg.sigma = diag.sigma_hat;
  scfg.grid_size = config.grid_size;
  double lambda = config.lambda;
  if (lambda <= 0) {
    std::vector<double> lgrid =
        config.lambda_grid.empty() ? default_lambda_grid() : config.lambda_grid;
    GcvResult gcv = gcv_select(work, scfg, lgrid);
    lambda = gcv.lambda_star;
  }
  scfg.lambda = lambda;
  diag.lambda_used = lambda;

  auto unconstrained_only = [&](const std::string& reason) {
    diag.fallback = true;
    diag.fallback_reason = reason;
    diag.constrained = false;
    result.second_stage = fit_spline(work, scfg);
    result.second_stage_unconstrained = result.second_stage;
  };

  // first stage: estimation region and grid
  const double width = 1.0 - 2.0 * h1;
  const double spacing = std::min(h1 / 16.0, width / 32.0);
  int nodes = spacing > 0 ? static_cast<int>(std::floor(width / spacing)) + 1 : 0;
  nodes = std::min(nodes, 4096);
  if (width <= 0 || nodes < 16) {
    unconstrained_only("estimation region too thin at the first-stage bandwidth");
  } else {
    std::vector<double> grid = interior_grid(h1, nodes);
    result.first_stage = gm_estimate_pair(work, config.dist, kernel, h1, grid);
    result.report = extract_change_points(result.first_stage);
    annotate_change_points(result.report, result.first_stage, config.dist, kernel, h1,
                           n, diag.sigma_hat, config.alpha);
    for (const auto& cl : result.report.clusters)
      diag.parity_flags.push_back(cl.odd ? 1 : 0);

    if (result.report.total_crossings() > n / 10) {
      unconstrained_only("oversegmented first stage");
    } else {
      result.constraints =
          constraint_intervals(result.report, result.first_stage, config, h1, n);
      for (const auto& iv : result.constraints.intervals)
        if (iv.deriv == ell + 1) diag.widths.push_back(0.5 * (iv.hi - iv.lo));

      result.second_stage_unconstrained = fit_spline(work, scfg);
      if (result.constraints.empty()) {
        diag.constrained = true;  // vacuously: nothing to impose
        result.second_stage = result.second_stage_unconstrained;
      } else {
        try {
          ConstrainedFit cf = fit_constrained(work, scfg, result.constraints);
          result.second_stage = std::move(cf.fit);
          result.qp = std::move(cf.qp);
          diag.constrained = true;
        } catch (const QpFailure& e) {
          unconstrained_only(std::string("QP failure: ") + e.what());
        } catch (const ConditioningError& e) {
          unconstrained_only(std::string("QP conditioning: ") + e.what());
        }
      }
    }
  }

  // undo the centering on both second-stage fits
  if (do_center && !result.centering_poly.empty()) {
    SplineSystem sys(samples, scfg);
    for (SplineFit* fit : {&result.second_stage, &result.second_stage_unconstrained}) {
      if (fit->values.empty()) continue;
      for (std::size_t k = 0; k < fit->values.size(); ++k)
        fit->values[k] += polyval(result.centering_poly, fit->grid[k]);
      fit->deriv[0] = fit->values;
      for (int j = 1; j <= fit->m; ++j) {
        std::vector<double> pj = polyderiv(result.centering_poly, j);
        for (std::size_t k = 0; k < fit->deriv[j].size(); ++k)
          fit->deriv[j][k] += polyval(pj, fit->deriv_abscissa(j, static_cast<int>(k)));
      }
      fit->rss = sys.rss(fit->values);
      fit->vp_value = 0.5 * scfg.lambda * sys.penalty_quad(fit->values) +
                      fit->rss / (static_cast<double>(n) * scfg.sigma * scfg.sigma);
    }
  }
  return result;
}

}  // namespace pcfit
