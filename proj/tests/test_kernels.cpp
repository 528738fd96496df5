#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pcfit/kernels.hpp"
#include "pcfit/math_util.hpp"
#include "pcfit/rng.hpp"

using namespace pcfit;

namespace {

SampleSet equispaced_samples(int n, const std::function<double(double)>& f,
                             double sigma = 0.0, std::uint64_t seed = 0) {
  SampleSet s;
  s.t.resize(n);
  s.y.resize(n);
  oracle::Lcg rng(seed);
  for (int i = 0; i < n; ++i) {
    s.t[i] = (i + 0.5) / n;
    s.y[i] = f(s.t[i]) + (sigma > 0 ? sigma * rng.normal() : 0.0);
  }
  s.sigma = sigma;
  return s;
}

}  // namespace

TEST_CASE("make_kernel: exact norms and moment conditions") {
  SUBCASE("ell = 0") {
    KernelSpec k = make_kernel(0);
    CHECK(k.value(0, 0.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(k.norm_sq(0) == doctest::Approx(3.0 / 5.0).epsilon(1e-14));
  }
  SUBCASE("ell = 1") {
    KernelSpec k = make_kernel(1);
    CHECK(k.value(0, 0.0) == doctest::Approx(15.0 / 16.0).epsilon(1e-15));
    CHECK(k.norm_sq(1) == doctest::Approx(15.0 / 7.0).epsilon(1e-14));
    CHECK(k.norm_sq(2) == doctest::Approx(45.0 / 2.0).epsilon(1e-14));
  }
  SUBCASE("every order: unit mass, zero first moment, boundary zeros") {
    for (int ell = 0; ell <= 4; ++ell) {
      KernelSpec k = make_kernel(ell);
      CHECK(k.poly(0).integrate(-1, 1) == doctest::Approx(1.0).epsilon(1e-13));
      Polynomial s_times({0.0, 1.0});
      CHECK(s_times.times(k.poly(0)).integrate(-1, 1) ==
            doctest::Approx(0.0).epsilon(1e-13));
      for (int j = 0; j <= ell; ++j) {
        CHECK(k.value(j, -1.0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(k.value(j, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
      }
      CHECK(k.value(0, 1.5) == 0.0);
    }
  }
  SUBCASE("unsupported order") { CHECK_THROWS_AS(make_kernel(5), std::invalid_argument); }
}

TEST_CASE("gm_estimate: constants, derivatives, and the Riemann oracle") {
  auto uniform = DesignDistribution::uniform();

  SUBCASE("constant response reproduced exactly at level 0") {
    auto s = equispaced_samples(400, [](double) { return 2.5; });
    KernelSpec k = make_kernel(0);
    std::vector<double> grid{0.2, 0.5, 0.8};
    auto fit = gm_estimate(s, uniform, k, 0.12, 0, grid);
    for (double v : fit.values_ell) CHECK(v == doctest::Approx(2.5).epsilon(1e-10));
  }

  SUBCASE("constant response: derivative estimate vanishes") {
    auto s = equispaced_samples(400, [](double) { return 2.5; });
    KernelSpec k = make_kernel(0);
    std::vector<double> grid{0.3, 0.5, 0.7};
    auto fit = gm_estimate(s, uniform, k, 0.12, 1, grid);
    for (double v : fit.values_ell1) CHECK(std::abs(v) < 1e-6);
  }

  SUBCASE("f = t^2: first derivative against a direct Riemann-sum oracle") {
    const int n = 2000;
    const double h = 0.1;
    auto s = equispaced_samples(n, [](double t) { return t * t; });
    KernelSpec k = make_kernel(1);
    std::vector<double> grid{0.5};
    auto fit = gm_estimate(s, uniform, k, h, 1, grid);

    // oracle: direct sum with uniform 1/N weights (midpoint design)
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += s.y[i] * k.value(1, (0.5 - s.t[i]) / h) / (n * h * h);
    CHECK(fit.values_ell[0] == doctest::Approx(acc).epsilon(1e-10));
    CHECK(std::abs(fit.values_ell[0] - 1.0) < 0.05);  // |bias| <= C h
  }

  SUBCASE("linearity is exact") {
    auto s1 = equispaced_samples(300, [](double t) { return std::sin(5 * t); }, 0.2, 11);
    auto s2 = equispaced_samples(300, [](double t) { return std::cos(3 * t); }, 0.2, 12);
    SampleSet combo = s1;
    for (int i = 0; i < 300; ++i) combo.y[i] = 2.0 * s1.y[i] - 0.5 * s2.y[i];
    KernelSpec k = make_kernel(1);
    std::vector<double> grid{0.25, 0.5, 0.75};
    auto f1 = gm_curve(s1, DesignDistribution::uniform(), k, 0.15, 1, grid);
    auto f2 = gm_curve(s2, DesignDistribution::uniform(), k, 0.15, 1, grid);
    auto fc = gm_curve(combo, DesignDistribution::uniform(), k, 0.15, 1, grid);
    for (int i = 0; i < 3; ++i)
      CHECK(fc[i] == doctest::Approx(2.0 * f1[i] - 0.5 * f2[i]).epsilon(1e-12));
  }

  SUBCASE("errors: boundary, bandwidth, derivative order") {
    auto s = equispaced_samples(50, [](double t) { return t; });
    KernelSpec k = make_kernel(0);
    std::vector<double> bad_grid{0.05};
    CHECK_THROWS_AS(gm_estimate(s, uniform, k, 0.2, 0, bad_grid), std::invalid_argument);
    std::vector<double> grid{0.5};
    CHECK_THROWS_AS(gm_estimate(s, uniform, k, 0.01, 0, grid), std::runtime_error);
    CHECK_THROWS_AS(gm_estimate(s, uniform, k, 0.2, 2, grid), std::invalid_argument);
  }
}

TEST_CASE("kernel_moments: arithmetic and scaling") {
  auto uniform = DesignDistribution::uniform();
  KernelSpec k0 = make_kernel(0);
  std::vector<double> grid{0.5};
  auto m1 = kernel_moments(uniform, k0, 0.1, 1000, 1.0, grid);
  CHECK(m1.sigma2[0] == doctest::Approx(6.0e-3).epsilon(1e-12));
  auto m2 = kernel_moments(uniform, k0, 0.1, 2000, 1.0, grid);
  CHECK(m2.sigma2[0] == doctest::Approx(0.5 * m1.sigma2[0]).epsilon(1e-12));
  CHECK(m1.xi2[0] == doctest::Approx(k0.norm_sq(1) / (1000 * std::pow(0.1, 3)))
                         .epsilon(1e-12));
}

TEST_CASE("kernel variance formula against Monte Carlo" * doctest::timeout(120)) {
  const int n = 400, reps = 2000;
  const double h = 0.15, sigma = 1.0;
  auto uniform = DesignDistribution::uniform();
  KernelSpec k = make_kernel(0);
  std::vector<double> grid{0.5};
  std::vector<double> estimates(reps);
  for (int r = 0; r < reps; ++r) {
    SampleSet s;
    s.t.resize(n);
    s.y.resize(n);
    CounterRng rng(555, n, r, RngStream::noise);
    for (int i = 0; i < n; ++i) {
      s.t[i] = (i + 0.5) / n;
      s.y[i] = sigma * rng.normal();
    }
    estimates[r] = gm_curve(s, uniform, k, h, 0, grid)[0];
  }
  double mc_var = variance(estimates);
  double pred = kernel_moments(uniform, k, h, n, sigma, grid).sigma2[0];
  CHECK(mc_var == doctest::Approx(pred).epsilon(0.10));
}

TEST_CASE("level and derivative estimates decorrelate" * doctest::timeout(120)) {
  const int n = 2000, reps = 400;
  const double h = 0.1, sigma = 1.0;
  auto uniform = DesignDistribution::uniform();
  KernelSpec k = make_kernel(0);
  std::vector<double> grid{0.5};
  std::vector<double> lvl(reps), der(reps);
  for (int r = 0; r < reps; ++r) {
    SampleSet s;
    s.t.resize(n);
    s.y.resize(n);
    CounterRng rng(777, n, r, RngStream::noise);
    for (int i = 0; i < n; ++i) {
      s.t[i] = (i + 0.5) / n;
      s.y[i] = sigma * rng.normal();
    }
    lvl[r] = gm_curve(s, uniform, k, h, 0, grid)[0];
    der[r] = gm_curve(s, uniform, k, h, 1, grid)[0];
  }
  double ml = mean(lvl), md = mean(der);
  double cov = 0.0;
  for (int r = 0; r < reps; ++r) cov += (lvl[r] - ml) * (der[r] - md);
  cov /= reps - 1;
  double corr = cov / std::sqrt(variance(lvl) * variance(der));
  CHECK(std::abs(corr) < 0.2);
}

TEST_CASE("polynomial reproduction within the fitted tolerance") {
  // zero noise, degree <= deriv: interior estimates reproduce f^{(deriv)};
  // reference constant fitted once on this configuration, asserted at x2
  auto uniform = DesignDistribution::uniform();
  const int n = 2000;
  const double h = 0.1;
  auto s = equispaced_samples(n, [](double t) { return 1.0 + 2.0 * t; });
  KernelSpec k = make_kernel(1);
  std::vector<double> grid{0.3, 0.5, 0.7};
  auto vals = gm_curve(s, uniform, k, h, 1, grid);
  for (double v : vals) CHECK(std::abs(v - 2.0) < 2.0 * 1e-3);
}

TEST_CASE("gcv bandwidth scan lands near the risk minimizer") {
  auto s = equispaced_samples(
      600, [](double t) { return std::sin(2 * 3.14159265358979 * t); }, 0.3, 42);
  auto uniform = DesignDistribution::uniform();
  KernelSpec k = make_kernel(1);
  auto grid = default_bandwidth_grid(600);
  BandwidthScan scan = select_bandwidth_gcv(s, uniform, k, grid, 0.3);
  CHECK(scan.h_star > 0.02);
  CHECK(scan.h_star < 0.35);
  CHECK(!scan.curve.empty());
}
