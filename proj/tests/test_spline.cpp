#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pcfit/math_util.hpp"
#include "pcfit/spline.hpp"

using namespace pcfit;

namespace {

SampleSet make_samples(int n, const std::function<double(double)>& f, double sigma,
                       std::uint64_t seed) {
  SampleSet s;
  s.t.resize(n);
  s.y.resize(n);
  oracle::Lcg rng(seed);
  for (int i = 0; i < n; ++i) {
    s.t[i] = (i + 0.5) / n;
    s.y[i] = f(s.t[i]) + (sigma > 0 ? sigma * rng.normal() : 0.0);
  }
  s.sigma = sigma > 0 ? sigma : 1.0;
  return s;
}

// Dense reimplementation of the discretized objective: assemble
// lambda D^T Q D + (2/(N sigma^2)) S^T S with plain loops and solve densely.
std::vector<double> dense_oracle_fit(const SampleSet& s, int m, double lambda,
                                     int grid_size, double sigma) {
  const int g = grid_size;
  const double dx = 1.0 / (g - 1);
  // D_m rows
  std::vector<double> stencil{1.0};
  for (int pass = 0; pass < m; ++pass) {
    std::vector<double> next(stencil.size() + 1, 0.0);
    for (std::size_t i = 0; i < stencil.size(); ++i) {
      next[i] -= stencil[i];
      next[i + 1] += stencil[i];
    }
    stencil = next;
  }
  oracle::Matrix a(g, std::vector<double>(g, 0.0));
  std::vector<double> b(g, 0.0);
  const int rows = g - m;
  for (int k = 0; k < rows; ++k) {
    double q = dx * ((k == 0 || k == rows - 1) ? 0.5 : 1.0);
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j)
        a[k + i][k + j] +=
            lambda * q * stencil[i] * stencil[j] / std::pow(dx, 2 * m);
  }
  const double c = 2.0 / (s.t.size() * sigma * sigma);
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    double u = s.t[i] / dx;
    int j = std::min(static_cast<int>(u), g - 2);
    double frac = std::clamp(u - j, 0.0, 1.0);
    double w[2] = {1.0 - frac, frac};
    for (int p = 0; p < 2; ++p)
      for (int r = 0; r < 2; ++r) a[j + p][j + r] += c * w[p] * w[r];
    b[j] += c * w[0] * s.y[i];
    b[j + 1] += c * w[1] * s.y[i];
  }
  return oracle::solve_dense(std::move(a), std::move(b));
}

}  // namespace

TEST_CASE("fit_spline matches the dense normal-equations oracle to 1e-10") {
  SampleSet s;
  s.t = {0.05, 0.2, 0.33, 0.5, 0.62, 0.8, 0.95};
  s.y = {0.3, -0.1, 0.4, 0.2, 0.5, -0.2, 0.1};
  s.sigma = 1.0;
  SplineConfig cfg;
  cfg.m = 2;
  cfg.lambda = 0.01;
  cfg.grid_size = 64;
  cfg.sigma = 1.0;
  SplineFit fit = fit_spline(s, cfg);
  auto oracle_vals = dense_oracle_fit(s, 2, 0.01, 64, 1.0);
  double scale = 0.0;
  for (double v : oracle_vals) scale = std::max(scale, std::abs(v));
  for (int k = 0; k < 64; ++k)
    CHECK(std::abs(fit.values[k] - oracle_vals[k]) < 1e-10 * std::max(1.0, scale));
}

TEST_CASE("huge lambda approaches the least-squares line") {
  auto s = make_samples(80, [](double t) { return 1.0 + 0.5 * t; }, 0.4, 17);
  SplineConfig cfg;
  cfg.m = 2;
  cfg.lambda = 1e12;
  cfg.grid_size = 256;
  cfg.sigma = 0.4;
  SplineFit fit = fit_spline(s, cfg);

  // analytic simple regression line
  double mt = mean(s.t), my = mean(s.y);
  double sxx = 0, sxy = 0;
  for (int i = 0; i < 80; ++i) {
    sxx += (s.t[i] - mt) * (s.t[i] - mt);
    sxy += (s.t[i] - mt) * (s.y[i] - my);
  }
  double beta = sxy / sxx, alpha = my - beta * mt;
  double range = *std::max_element(s.y.begin(), s.y.end()) -
                 *std::min_element(s.y.begin(), s.y.end());
  for (std::size_t k = 0; k < fit.grid.size(); ++k)
    CHECK(std::abs(fit.values[k] - (alpha + beta * fit.grid[k])) < 1e-4 * range);
  CHECK(fit.p_eff == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("tiny lambda with data on grid nodes interpolates") {
  // data exactly at every 4th node of a 101-point grid
  SampleSet s;
  const int g = 101;
  for (int k = 0; k < g; k += 4) {
    s.t.push_back(k / 100.0);
    s.y.push_back(std::sin(3.0 * k / 100.0));
  }
  s.sigma = 1.0;
  SplineConfig cfg;
  cfg.m = 2;
  cfg.lambda = 1e-10;
  cfg.grid_size = g;
  cfg.sigma = 1.0;
  SplineFit fit = fit_spline(s, cfg);
  for (std::size_t i = 0; i < s.t.size(); ++i)
    CHECK(std::abs(fit.eval(s.t[i]) - s.y[i]) < 1e-6);
  CHECK(fit.p_eff > 0.99 * s.t.size());
}

TEST_CASE("influence is linear and reproduces lines exactly") {
  SplineConfig cfg;
  cfg.m = 2;
  cfg.lambda = 0.003;
  cfg.grid_size = 128;
  cfg.sigma = 1.0;

  SUBCASE("superposition to 1e-10") {
    auto s1 = make_samples(60, [](double t) { return std::sin(4 * t); }, 0.3, 1);
    auto s2 = make_samples(60, [](double t) { return std::cos(2 * t); }, 0.3, 2);
    SampleSet combo = s1;
    for (int i = 0; i < 60; ++i) combo.y[i] = 1.7 * s1.y[i] - 0.6 * s2.y[i];
    auto f1 = fit_spline(s1, cfg), f2 = fit_spline(s2, cfg), fc = fit_spline(combo, cfg);
    for (int k = 0; k < 128; ++k)
      CHECK(fc.values[k] ==
            doctest::Approx(1.7 * f1.values[k] - 0.6 * f2.values[k]).epsilon(1e-10));
  }

  SUBCASE("degree < m data is a fixed point") {
    auto s = make_samples(60, [](double t) { return 2.0 - 3.0 * t; }, 0.0, 0);
    auto fit = fit_spline(s, cfg);
    for (int k = 0; k < 128; ++k)
      CHECK(fit.values[k] ==
            doctest::Approx(2.0 - 3.0 * fit.grid[k]).epsilon(1e-8));
  }
}

TEST_CASE("p_eff: bounds, monotonicity in lambda, exactness") {
  auto s = make_samples(90, [](double t) { return std::sin(5 * t); }, 0.3, 5);
  SplineConfig cfg;
  cfg.m = 2;
  cfg.grid_size = 160;
  cfg.sigma = 0.3;

  double prev = std::numeric_limits<double>::infinity();
  for (double lam : logspace(1e-8, 1e2, 12)) {
    cfg.lambda = lam;
    SplineFit fit = fit_spline(s, cfg);
    CHECK(fit.p_eff >= cfg.m - 1e-8);
    CHECK(fit.p_eff <= 90 + 1e-8);
    CHECK(fit.p_eff <= prev + 1e-9);
    prev = fit.p_eff;
  }

  SUBCASE("trace equals the brute-force influence trace") {
    cfg.lambda = 0.02;
    cfg.grid_size = 48;
    SampleSet small = make_samples(25, [](double t) { return t * t; }, 0.2, 9);
    SplineFit fit = fit_spline(small, cfg);
    // brute force: perturb each y_i and read the change in the fit at t_i
    double trace = 0.0;
    for (int i = 0; i < 25; ++i) {
      SampleSet bumped = small;
      const double eps = 1e-6;
      bumped.y[i] += eps;
      SplineFit fb = fit_spline(bumped, cfg);
      trace += (fb.eval(small.t[i]) - fit.eval(small.t[i])) / eps;
    }
    CHECK(fit.p_eff == doctest::Approx(trace).epsilon(1e-5));
  }
}

TEST_CASE("v_norm: closed forms and the independent direct-summation oracle") {
  auto s = make_samples(50, [](double t) { return t; }, 0.0, 0);
  SplineConfig cfg;
  cfg.m = 2;
  cfg.lambda = 2.0;
  cfg.grid_size = 200;
  cfg.sigma = 1.0;

  SUBCASE("zero function") {
    std::vector<double> g(200, 0.0);
    CHECK(v_norm(g, s, cfg) == doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("constant c gives c^2 / sigma^2") {
    std::vector<double> g(200, 3.0);
    CHECK(v_norm(g, s, cfg) == doctest::Approx(9.0).epsilon(1e-10));
    cfg.sigma = 2.0;
    CHECK(v_norm(g, s, cfg) == doctest::Approx(9.0 / 4.0).epsilon(1e-10));
    cfg.sigma = 1.0;
  }

  SUBCASE("t^2 against an independent direct summation") {
    const int G = 200;
    std::vector<double> g(G);
    for (int k = 0; k < G; ++k) {
      double x = k / double(G - 1);
      g[k] = x * x;
    }
    double v = v_norm(g, s, cfg);

    // independent path: plain loops over the same discrete formula
    const double dx = 1.0 / (G - 1);
    double pen = 0.0;
    for (int k = 0; k + 2 < G; ++k) {
      double d2 = (g[k + 2] - 2 * g[k + 1] + g[k]) / (dx * dx);
      double q = dx * ((k == 0 || k == G - 3) ? 0.5 : 1.0);
      pen += q * d2 * d2;
    }
    double dat = 0.0;
    for (double ti : s.t) {
      double u = ti / dx;
      int j = std::min(static_cast<int>(u), G - 2);
      double a = u - j;
      double gi = (1 - a) * g[j] + a * g[j + 1];
      dat += gi * gi;
    }
    double expect = 0.5 * cfg.lambda * pen + dat / (50.0 * 1.0);
    CHECK(v == doctest::Approx(expect).epsilon(1e-10));
    // and the continuum arithmetic it approximates: 4 + mean(t^4)
    double cont = 4.0;
    for (double ti : s.t) cont += ti * ti * ti * ti / 50.0;
    CHECK(v == doctest::Approx(cont).epsilon(0.02));
  }
}

TEST_CASE("gcv_select: definitional consistency and limits") {
  SplineConfig cfg;
  cfg.m = 2;
  cfg.sigma = 0.4;
  cfg.grid_size = 192;

  SUBCASE("score recomputes from rss and p_eff") {
    auto s = make_samples(70, [](double t) { return std::sin(6 * t); }, 0.4, 3);
    auto lg = logspace(1e-7, 1.0, 10);
    GcvResult res = gcv_select(s, cfg, lg);
    for (const auto& pt : res.curve) {
      if (!std::isfinite(pt.score)) continue;
      SplineConfig one = cfg;
      one.lambda = pt.lambda;
      SplineFit fit = fit_spline(s, one);
      double sigma_hat2 = fit.rss / (70.0 * 0.4 * 0.4);
      double expect = sigma_hat2 / std::pow(1.0 - fit.p_eff / 70.0, 2);
      CHECK(pt.score == doctest::Approx(expect).epsilon(1e-9));
    }
  }

  SUBCASE("pure noise prefers the largest lambda in at least 90 of 100 runs") {
    auto lg = logspace(1e-6, 1e2, 8);
    int top = 0;
    for (int rep = 0; rep < 100; ++rep) {
      auto s = make_samples(60, [](double) { return 0.0; }, 0.5, 100 + rep);
      GcvResult res = gcv_select(s, cfg, lg);
      if (res.lambda_star == lg.back()) ++top;
    }
    CHECK(top >= 90);
  }

  SUBCASE("noiseless smooth truth avoids the top of the grid") {
    auto s = make_samples(120, [](double t) { return std::sin(8 * t); }, 0.0, 0);
    s.sigma = 0.05;  // nominal noise scale for the criterion
    SplineConfig c2 = cfg;
    c2.sigma = 0.05;
    auto lg = logspace(1e-9, 1e2, 12);
    GcvResult res = gcv_select(s, c2, lg);
    CHECK(res.lambda_star < lg.back());
    // fitted MISE no worse than at lambda_max
    SplineConfig at_max = c2;
    at_max.lambda = lg.back();
    SplineFit fmax = fit_spline(s, at_max);
    auto ise = [&](const SplineFit& f) {
      double acc = 0.0;
      for (std::size_t k = 0; k < f.grid.size(); ++k) {
        double d = f.values[k] - std::sin(8 * f.grid[k]);
        acc += d * d;
      }
      return acc / f.grid.size();
    };
    CHECK(ise(res.best) <= ise(fmax) + 1e-12);
  }

  SUBCASE("ties resolve toward larger lambda") {
    auto s = make_samples(60, [](double) { return 0.0; }, 0.5, 7);
    std::vector<double> lg{1e9, 1e10};  // both in the polynomial-limit regime
    GcvResult res = gcv_select(s, cfg, lg);
    CHECK(res.lambda_star == 1e10);
  }
}

TEST_CASE("spline config validation") {
  auto s = make_samples(20, [](double t) { return t; }, 0.1, 1);
  SplineConfig cfg;
  cfg.m = 2;
  cfg.lambda = 0.0;
  CHECK_THROWS(fit_spline(s, cfg));
  cfg.lambda = 1.0;
  cfg.grid_size = 6;  // below 4m
  CHECK_THROWS_AS(fit_spline(s, cfg), std::invalid_argument);
  SampleSet tiny;
  tiny.t = {0.1, 0.5};
  tiny.y = {0.0, 1.0};
  SplineConfig c3;
  c3.m = 2;
  c3.lambda = 0.1;
  CHECK_THROWS_AS(fit_spline(tiny, c3), std::invalid_argument);
}
