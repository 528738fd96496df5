#include "pcfit/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pcfit/math_util.hpp"
#include "pcfit/poly.hpp"

namespace pcfit {

double SplineFit::eval(double t) const {
  return interp_uniform(grid.front(), step(), values, t);
}

double SplineFit::eval_deriv(int j, double t) const {
  if (j < 0 || j >= static_cast<int>(deriv.size()))
    throw std::invalid_argument("SplineFit::eval_deriv: order out of range");
  return interp_uniform(grid.front() + 0.5 * j * step(), step(), deriv[j], t);
}

int default_grid_size(int n) { return std::min(std::max(256, 2 * n), 4096); }

namespace {

std::vector<double> binomial_stencil(int m) {
  // (-1)^{m-j} C(m, j), j = 0..m
  std::vector<double> c(m + 1);
  double binom = 1.0;
  for (int j = 0; j <= m; ++j) {
    c[j] = ((m - j) % 2 ? -binom : binom);
    binom = binom * (m - j) / (j + 1);
  }
  return c;
}

}  // namespace

SplineSystem::SplineSystem(const SampleSet& samples, const SplineConfig& config)
    : n_(samples.size()),
      m_(config.m),
      grid_size_(config.grid_size > 0 ? config.grid_size : default_grid_size(samples.size())),
      penalty_(1, 0),
      data_term_(1, 0) {
  samples.validate();
  if (m_ < 1) throw std::invalid_argument("SplineSystem: m < 1");
  if (n_ < m_ + 1) throw std::invalid_argument("SplineSystem: need N >= m + 1");
  if (grid_size_ < 4 * m_)
    throw std::invalid_argument("SplineSystem: grid_size below 4m");
  sigma_ = config.sigma > 0 ? config.sigma : noise_sd(samples);
  if (!(sigma_ > 0)) throw std::invalid_argument("SplineSystem: nonpositive sigma");

  dx_ = 1.0 / (grid_size_ - 1);
  grid_.resize(grid_size_);
  for (int k = 0; k < grid_size_; ++k) grid_[k] = k * dx_;

  stencil_ = binomial_stencil(m_);

  // penalty D^T Q D with trapezoidal q over the G-m difference nodes
  penalty_ = SymBandMatrix(grid_size_, m_);
  const int rows = grid_size_ - m_;
  const double dscale = std::pow(dx_, -m_);
  for (int k = 0; k < rows; ++k) {
    double q = dx_ * ((k == 0 || k == rows - 1) ? 0.5 : 1.0);
    for (int a = 0; a <= m_; ++a)
      for (int b = a; b <= m_; ++b)
        penalty_.add(k + b, k + a, q * dscale * dscale * stencil_[a] * stencil_[b]);
  }

  // data term (2/(N sigma^2)) S^T S and rhs (2/(N sigma^2)) S^T y
  data_term_ = SymBandMatrix(grid_size_, 1);
  b_.assign(grid_size_, 0.0);
  y_ = samples.y;
  s_idx_.resize(n_);
  s_frac_.resize(n_);
  const double c = 2.0 / (static_cast<double>(n_) * sigma_ * sigma_);
  for (int i = 0; i < n_; ++i) {
    double u = samples.t[i] / dx_;
    int j = std::min(static_cast<int>(u), grid_size_ - 2);
    double a = u - j;
    if (a < 0) a = 0;
    if (a > 1) a = 1;
    s_idx_[i] = j;
    s_frac_[i] = a;
    double w0 = 1.0 - a, w1 = a;
    data_term_.add(j, j, c * w0 * w0);
    data_term_.add(j + 1, j + 1, c * w1 * w1);
    data_term_.add(j + 1, j, c * w0 * w1);
    b_[j] += c * w0 * samples.y[i];
    b_[j + 1] += c * w1 * samples.y[i];
  }
}

SymBandMatrix SplineSystem::assemble(double lambda) const {
  if (!(lambda > 0)) throw std::invalid_argument("SplineSystem: lambda must be > 0");
  SymBandMatrix a(grid_size_, m_);
  for (int j = 0; j < grid_size_; ++j) {
    for (int d = 0; d <= m_; ++d) {
      int i = j + d;
      if (i >= grid_size_) break;
      double v = lambda * penalty_.get(i, j) + (d <= 1 ? data_term_.get(i, j) : 0.0);
      if (v != 0.0) a.set(i, j, v);
    }
  }
  return a;
}

bool SplineSystem::huge_lambda(double lambda) const {
  // The smoothest non-polynomial mode has penalty curvature about (2 pi)^{2m}
  // against a data-term weight of 2/sigma^2, so its surviving amplitude is
  // ~ 2 / (sigma^2 lambda (2 pi)^{2m}). Once that drops below 1e-6 the
  // minimizer is the penalty-null-space polynomial to better accuracy than
  // the increasingly ill-conditioned banded solve could deliver.
  return lambda * std::pow(2.0 * 3.14159265358979323846, 2 * m_) >
         2e6 / (sigma_ * sigma_);
}

std::vector<double> SplineSystem::poly_limit_values() const {
  // lambda -> infinity limit: least-squares polynomial of degree < m
  std::vector<double> t(n_);
  for (int i = 0; i < n_; ++i) t[i] = grid_[s_idx_[i]] + s_frac_[i] * dx_;
  std::vector<double> coeff = polyfit(t, y_, m_ - 1);
  std::vector<double> out(grid_size_);
  for (int k = 0; k < grid_size_; ++k) out[k] = polyval(coeff, grid_[k]);
  return out;
}

std::vector<double> SplineSystem::solve(double lambda) const {
  if (huge_lambda(lambda)) return poly_limit_values();
  BandCholesky chol(assemble(lambda));
  return chol.solve(b_);
}

double SplineSystem::penalty_quad(std::span<const double> g) const {
  if (static_cast<int>(g.size()) != grid_size_)
    throw std::invalid_argument("penalty_quad: size mismatch");
  const int rows = grid_size_ - m_;
  const double dscale = std::pow(dx_, -m_);
  CompensatedSum s;
  for (int k = 0; k < rows; ++k) {
    double d = 0.0;
    for (int a = 0; a <= m_; ++a) d += stencil_[a] * g[k + a];
    d *= dscale;
    double q = dx_ * ((k == 0 || k == rows - 1) ? 0.5 : 1.0);
    s.add(q * d * d);
  }
  return s.value();
}

double SplineSystem::data_sumsq(std::span<const double> g) const {
  if (static_cast<int>(g.size()) != grid_size_)
    throw std::invalid_argument("data_sumsq: size mismatch");
  CompensatedSum s;
  for (int i = 0; i < n_; ++i) {
    double v = (1.0 - s_frac_[i]) * g[s_idx_[i]] + s_frac_[i] * g[s_idx_[i] + 1];
    s.add(v * v);
  }
  return s.value();
}

double SplineSystem::rss(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != grid_size_)
    throw std::invalid_argument("rss: size mismatch");
  CompensatedSum s;
  for (int i = 0; i < n_; ++i) {
    double v = (1.0 - s_frac_[i]) * values[s_idx_[i]] + s_frac_[i] * values[s_idx_[i] + 1];
    double r = y_[i] - v;
    s.add(r * r);
  }
  return s.value();
}

SplineSystem::Row SplineSystem::derivative_row(int d, int k) const {
  if (d < 0 || d > m_ + 1 || d >= grid_size_)
    throw std::invalid_argument("derivative_row: order out of range");
  if (k < 0 || k >= deriv_nodes(d))
    throw std::invalid_argument("derivative_row: node out of range");
  Row r;
  r.first = k;
  r.coef = binomial_stencil(d);
  double peak = 0.0;
  for (double c : r.coef) peak = std::max(peak, std::abs(c));
  for (double& c : r.coef) c /= peak;
  return r;
}

SplineFit SplineSystem::finish(std::vector<double> values, double lambda) const {
  SplineFit fit;
  fit.grid = grid_;
  fit.lambda = lambda;
  fit.m = m_;
  fit.rss = rss(values);
  fit.vp_value = 0.5 * lambda * penalty_quad(values) +
                 fit.rss / (static_cast<double>(n_) * sigma_ * sigma_);
  fit.values = std::move(values);
  fit.deriv.resize(m_ + 1);
  fit.deriv[0] = fit.values;
  for (int j = 1; j <= m_; ++j) {
    const auto& prev = fit.deriv[j - 1];
    fit.deriv[j].resize(prev.size() - 1);
    for (std::size_t k = 0; k + 1 < prev.size(); ++k)
      fit.deriv[j][k] = (prev[k + 1] - prev[k]) / dx_;
  }

  if (huge_lambda(lambda)) {
    fit.p_eff = m_;  // polynomial-limit hat matrix has rank m
  } else {
    BandCholesky chol(assemble(lambda));
    fit.p_eff = band_trace_product(chol.inverse_band(), data_term_);
  }
  return fit;
}

SplineFit fit_spline(const SampleSet& samples, const SplineConfig& config) {
  SplineSystem sys(samples, config);
  return sys.finish(sys.solve(config.lambda), config.lambda);
}

double v_norm(std::span<const double> g, const SampleSet& samples,
              const SplineConfig& config) {
  SplineSystem sys(samples, config);
  return 0.5 * config.lambda * sys.penalty_quad(g) +
         sys.data_sumsq(g) / (static_cast<double>(sys.n()) * sys.sigma() * sys.sigma());
}

std::vector<double> default_lambda_grid() { return logspace(1e-9, 1e2, 34); }

GcvResult gcv_select(const SampleSet& samples, const SplineConfig& config_template,
                     std::span<const double> lambda_grid) {
  if (lambda_grid.empty()) throw std::invalid_argument("gcv_select: empty lambda grid");
  SplineSystem sys(samples, config_template);
  const double nn = sys.n();
  const double s2 = sys.sigma() * sys.sigma();

  GcvResult out;
  double best = std::numeric_limits<double>::infinity();
  bool have = false;
  for (double lambda : lambda_grid) {
    SplineFit fit;
    try {
      fit = sys.finish(sys.solve(lambda), lambda);
    } catch (const ConditioningError&) {
      out.curve.push_back({lambda, std::numeric_limits<double>::infinity(), 0.0});
      continue;
    }
    double score = std::numeric_limits<double>::infinity();
    if (fit.p_eff < nn) {
      double sigma_hat2 = fit.rss / (nn * s2);
      double denom = 1.0 - fit.p_eff / nn;
      score = sigma_hat2 / (denom * denom);
    }
    out.curve.push_back({lambda, score, fit.p_eff});
    if (std::isfinite(score) && score <= best) {
      best = score;
      out.lambda_star = lambda;
      out.best = std::move(fit);
      have = true;
    }
  }
  if (!have) throw std::runtime_error("gcv_select: every lambda had p >= N");
  return out;
}

}  // namespace pcfit
