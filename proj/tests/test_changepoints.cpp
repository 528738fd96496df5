#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pcfit/changepoints.hpp"
#include "pcfit/math_util.hpp"
#include "pcfit/normal.hpp"
#include "pcfit/rng.hpp"

using namespace pcfit;

namespace {

KernelFit synthetic_fit(const std::function<double(double)>& f, double lo, double hi,
                        int nodes, double h) {
  KernelFit fit;
  fit.bandwidth = h;
  fit.ell = 1;
  fit.grid.resize(nodes);
  fit.values_ell.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    fit.grid[i] = lo + (hi - lo) * i / (nodes - 1);
    fit.values_ell[i] = f(fit.grid[i]);
  }
  return fit;
}

int brute_force_sign_changes(const std::vector<double>& v) {
  int count = 0, prev = 0;
  for (double x : v) {
    int s = x > 0 ? 1 : (x < 0 ? -1 : 0);
    if (s != 0) {
      if (prev != 0 && s != prev) ++count;
      prev = s;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("extract_change_points: basic shapes") {
  SUBCASE("strictly positive input yields an empty report") {
    auto fit = synthetic_fit([](double) { return 1.0; }, 0.1, 0.9, 200, 0.1);
    auto rep = extract_change_points(fit);
    CHECK(rep.count == 0);
    CHECK(rep.points.empty());
    CHECK(rep.clusters.empty());
  }

  SUBCASE("single linear crossing at 0.5") {
    auto fit = synthetic_fit([](double t) { return t - 0.5; }, 0.1, 0.9, 400, 0.05);
    auto rep = extract_change_points(fit);
    REQUIRE(rep.count == 1);
    REQUIRE(rep.points.size() == 1);
    CHECK(rep.points[0].x_hat == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rep.points[0].sign_flip == 1);
    CHECK(rep.clusters[0].odd);
  }

  SUBCASE("sin(6 pi t): five crossings, each its own cluster for small h") {
    const double pi = 3.14159265358979323846;
    auto fit = synthetic_fit([pi](double t) { return std::sin(6 * pi * t); }, 0.1, 0.9,
                             2000, 1.0 / 30.0);
    auto rep = extract_change_points(fit);
    std::vector<double> expect{1.0 / 6, 2.0 / 6, 3.0 / 6, 4.0 / 6, 5.0 / 6};
    REQUIRE(rep.points.size() == expect.size());
    CHECK(rep.count == static_cast<int>(expect.size()));
    for (std::size_t i = 0; i < expect.size(); ++i)
      CHECK(rep.points[i].x_hat == doctest::Approx(expect[i]).epsilon(1e-6));
    CHECK(rep.clusters.size() == expect.size());
    CHECK(rep.total_crossings() == brute_force_sign_changes(fit.values_ell));
  }

  SUBCASE("cluster merge within 2h") {
    // three crossings within 0.02 of each other, h = 0.05: one odd cluster
    auto wiggle = [](double t) {
      return (t - 0.49) * (t - 0.5) * (t - 0.51);
    };
    auto fit = synthetic_fit(wiggle, 0.2, 0.8, 4000, 0.05);
    auto rep = extract_change_points(fit);
    CHECK(rep.points.size() == 3);
    CHECK(rep.clusters.size() == 1);
    CHECK(rep.count == 1);
    CHECK(rep.clusters[0].odd);
    // representative is the median crossing
    CHECK(rep.points[rep.clusters[0].representative].x_hat ==
          doctest::Approx(0.5).epsilon(1e-6));
  }

  SUBCASE("exact grid zero resolves to the following interval") {
    KernelFit fit;
    fit.bandwidth = 0.5;
    fit.ell = 0;
    fit.grid = {0.50, 0.52, 0.54, 0.56};
    fit.values_ell = {-1.0, 0.0, 1.0, 2.0};
    auto rep = extract_change_points(fit);
    REQUIRE(rep.points.size() == 1);
    CHECK(rep.points[0].x_hat == doctest::Approx(0.52).epsilon(1e-12));

    fit.values_ell = {1.0, 0.0, 1.0, 2.0};  // touch, not a crossing
    auto rep2 = extract_change_points(fit);
    CHECK(rep2.points.empty());
  }

  SUBCASE("equivariance under negation") {
    auto f = [](double t) { return std::sin(13.0 * t) + 0.2; };
    auto fit = synthetic_fit(f, 0.1, 0.9, 1500, 0.02);
    auto neg = fit;
    for (auto& v : neg.values_ell) v = -v;
    auto r1 = extract_change_points(fit);
    auto r2 = extract_change_points(neg);
    REQUIRE(r1.points.size() == r2.points.size());
    for (std::size_t i = 0; i < r1.points.size(); ++i) {
      CHECK(r1.points[i].x_hat == doctest::Approx(r2.points[i].x_hat).epsilon(1e-12));
      CHECK(r1.points[i].sign_flip == -r2.points[i].sign_flip);
    }
  }

  SUBCASE("oracle equivalence on 200 random grids") {
    oracle::Lcg rng(31);
    for (int trial = 0; trial < 200; ++trial) {
      KernelFit fit;
      fit.bandwidth = 0.5;  // spacing constraint trivially satisfied
      fit.ell = 0;
      int nodes = 20 + static_cast<int>(rng.uniform() * 60);
      fit.grid.resize(nodes);
      fit.values_ell.resize(nodes);
      for (int i = 0; i < nodes; ++i) {
        fit.grid[i] = 0.1 + 0.8 * i / (nodes - 1);
        double v = rng.normal();
        if (rng.uniform() < 0.08) v = 0.0;  // sprinkle exact zeros
        fit.values_ell[i] = v;
      }
      auto rep = extract_change_points(fit);
      CHECK(rep.total_crossings() == brute_force_sign_changes(fit.values_ell));
    }
  }

  SUBCASE("grid too coarse is rejected") {
    auto fit = synthetic_fit([](double t) { return t - 0.5; }, 0.1, 0.9, 10, 0.05);
    CHECK_THROWS_AS(extract_change_points(fit), std::invalid_argument);
  }
}

TEST_CASE("h_function: values, tails, monotonicity") {
  // direct phi/Phi oracle
  auto href = [](double z) { return normal_pdf(z) / z + normal_cdf(z) - 1.0; };
  CHECK(h_function(1.0) == doctest::Approx(0.0833154705876763).epsilon(1e-6));
  CHECK(h_function(2.0) == doctest::Approx(0.0042453544745290).epsilon(1e-6));
  CHECK(h_function(1.0) == doctest::Approx(href(1.0)).epsilon(1e-14));
  CHECK(h_function(8.0) < 1e-12);
  CHECK_THROWS_AS(h_function(0.0), std::domain_error);
  CHECK_THROWS_AS(h_function(-1.0), std::domain_error);

  SUBCASE("quadrature oracle: H(z) = int_z^inf phi(u)/u^2 du") {
    for (double z : {0.3, 0.7, 1.3, 2.4}) {
      double quad = integrate_simpson(
          [](double u) { return normal_pdf(u) / (u * u); }, z, z + 14.0, 1e-13);
      CHECK(h_function(z) == doctest::Approx(quad).epsilon(1e-8));
    }
  }

  SUBCASE("strictly decreasing on a log grid") {
    double prev = h_function(1e-3);
    for (int i = 1; i <= 80; ++i) {
      double z = 1e-3 * std::pow(10.0 / 1e-3, i / 80.0);
      double cur = h_function(z);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("sigma_if: scaling, arithmetic, Monte Carlo") {
  auto uniform = DesignDistribution::uniform();
  KernelSpec k0 = make_kernel(0);

  SUBCASE("halving under doubled slope") {
    double a = sigma_if(1.0, 0.5, uniform, k0, 0.1, 1000, 1.0);
    double b = sigma_if(2.0, 0.5, uniform, k0, 0.1, 1000, 1.0);
    CHECK(a == doctest::Approx(2.0 * b).epsilon(1e-12));
  }

  SUBCASE("reference arithmetic") {
    CHECK(sigma_if(1.0, 0.5, uniform, k0, 0.1, 1000, 1.0) ==
          doctest::Approx(std::sqrt(3.0 / 5.0 / 100.0)).epsilon(1e-12));
  }

  SUBCASE("zero derivative rejected") {
    CHECK_THROWS_AS(sigma_if(0.0, 0.5, uniform, k0, 0.1, 1000, 1.0),
                    std::invalid_argument);
  }

  SUBCASE("Monte Carlo crossing-location spread") {
    const int n = 4000, reps = 300;
    const double h = 0.1, sigma = 0.5;
    std::vector<double> locs;
    locs.reserve(reps);
    std::vector<double> grid;
    for (double t = 0.35; t <= 0.65; t += h / 20.0) grid.push_back(t);
    for (int r = 0; r < reps; ++r) {
      SampleSet s;
      s.t.resize(n);
      s.y.resize(n);
      CounterRng rng(808, n, r, RngStream::noise);
      for (int i = 0; i < n; ++i) {
        s.t[i] = (i + 0.5) / n;
        s.y[i] = (s.t[i] - 0.5) + sigma * rng.normal();
      }
      auto fit = gm_estimate(s, uniform, k0, h, 0, grid);
      auto rep = extract_change_points(fit);
      if (rep.count == 1)
        locs.push_back(rep.points[rep.clusters[0].representative].x_hat);
    }
    REQUIRE(locs.size() > 0.9 * reps);
    double sd = std::sqrt(variance(locs));
    double pred = sigma_if(1.0, 0.5, uniform, k0, h, n, sigma);
    CHECK(sd == doctest::Approx(pred).epsilon(0.15));
  }
}

TEST_CASE("expected_false_changepoints: limits, arithmetic, monotonicity") {
  auto uniform = DesignDistribution::uniform();
  KernelSpec k1 = make_kernel(1);
  ChangePointTruth tr{{0.25, 0.75}, {4.0, -4.0}};

  SUBCASE("vanishes as sigma -> 0") {
    double v = expected_false_changepoints(tr, uniform, k1, 0.15, 2000, 1e-6);
    CHECK(v < 1e-12);
  }

  SUBCASE("arithmetic cross-check for a single change point") {
    ChangePointTruth one{{0.5}, {4.0}};
    const double h = 0.15, sigma = 1.0;
    const int n = 2000;
    double z = std::sqrt(16.0 * n * std::pow(h, 5) / (sigma * sigma * k1.norm_sq(2)));
    double expect = 2.0 * h_function(z);
    CHECK(expected_false_changepoints(one, uniform, k1, h, n, sigma) ==
          doctest::Approx(expect).epsilon(1e-12));
    double quad = integrate_simpson(
        [](double u) { return normal_pdf(u) / (u * u); }, z, z + 14.0, 1e-13);
    CHECK(expected_false_changepoints(one, uniform, k1, h, n, sigma) ==
          doctest::Approx(2.0 * quad).epsilon(1e-7));
  }

  SUBCASE("monotone decreasing in h over the tested range") {
    double prev = std::numeric_limits<double>::infinity();
    for (double h : {0.06, 0.08, 0.10, 0.13, 0.16, 0.20}) {
      double v = expected_false_changepoints(tr, uniform, k1, h, 2000, 1.0);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("false_cp_prob_bound: tail behavior and arithmetic") {
  auto uniform = DesignDistribution::uniform();
  KernelSpec k0 = make_kernel(0);

  SUBCASE("arithmetic: (sigma_if/h) exp(-w^2 / 2 sigma_if^2)") {
    // choose inputs that make sigma_if = 0.05 exactly
    const double h = 0.1, sigma = 1.0, w = 0.2;
    const double target = 0.05;
    double slope = sigma * k0.norm(0) / (target * std::sqrt(1000.0 * h));
    ChangePointTruth tr{{0.5}, {slope}};
    double expect = (target / h) * std::exp(-w * w / (2 * target * target));
    CHECK(false_cp_prob_bound(tr, uniform, k0, h, 1000, sigma, w) ==
          doctest::Approx(expect).epsilon(1e-10));
    CHECK(expect == doctest::Approx(0.5 * std::exp(-8.0)).epsilon(1e-10));
  }

  SUBCASE("bound vanishes as the width grows") {
    ChangePointTruth tr{{0.5}, {1.0}};
    double prev = std::numeric_limits<double>::infinity();
    for (double w : {0.2, 0.4, 0.8}) {
      double v = false_cp_prob_bound(tr, uniform, k0, 0.1, 1000, 1.0, w);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(false_cp_prob_bound(tr, uniform, k0, 0.1, 1000, 1.0, 0.9) < 1e-25);
  }

  SUBCASE("scaling preconditions enforced") {
    ChangePointTruth tr{{0.5}, {1.0}};
    CHECK_THROWS_AS(false_cp_prob_bound(tr, uniform, k0, 0.3, 1000, 1.0, 0.2),
                    std::invalid_argument);
    CHECK_THROWS_AS(false_cp_prob_bound(tr, uniform, k0, 0.1, 10, 1.0, 0.11),
                    std::invalid_argument);
  }
}

TEST_CASE("uncertainty_interval: quantiles and symmetry") {
  KernelSpec k1 = make_kernel(1);

  SUBCASE("vanishing correction recovers the plain two-sided quantile") {
    // sharp change point: sigma_if << h puts the H argument far in the tail
    auto iv = uncertainty_interval(0.5, 1e-4, 0.05, k1, 0.3);
    double half = 0.5 * (iv.hi - iv.lo);
    CHECK(half / 1e-4 == doctest::Approx(1.95996).epsilon(1e-4));
  }

  SUBCASE("symmetry and arithmetic half-width") {
    auto iv = uncertainty_interval(0.37, 0.0003, 0.05, k1, 0.2);
    CHECK(0.5 * (iv.lo + iv.hi) == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(0.5 * (iv.hi - iv.lo) == doctest::Approx(1.95996 * 0.0003).epsilon(1e-3));
  }

  SUBCASE("corrected level clamps at one half") {
    // engineer the H argument so alpha (1 + 2H) lands in (0.5, 1):
    // argument 0.45 gives H ~ 0.475, so 0.4 * (1 + 0.95) ~ 0.78 -> clamp
    double arg = 0.45;
    double sigma_if_val = 0.3 * k1.norm(1) / (arg * k1.norm(2));
    double level = 0.4 * (1.0 + 2.0 * h_function(arg));
    REQUIRE(level > 0.5);
    REQUIRE(level < 1.0);
    auto iv = uncertainty_interval(0.5, sigma_if_val, 0.4, k1, 0.3);
    double half = 0.5 * (iv.hi - iv.lo);
    CHECK(half / sigma_if_val == doctest::Approx(normal_quantile(0.75)).epsilon(1e-6));
  }

  SUBCASE("degenerate corrected level throws") {
    // tiny H argument blows the correction past one
    CHECK_THROWS_AS(uncertainty_interval(0.5, 50.0, 0.4, k1, 1e-4), std::domain_error);
  }

  SUBCASE("domain errors") {
    CHECK_THROWS_AS(uncertainty_interval(0.5, 0.03, 0.0, k1, 0.1), std::domain_error);
    CHECK_THROWS_AS(uncertainty_interval(0.5, 0.03, 1.0, k1, 0.1), std::domain_error);
  }
}

TEST_CASE("annotate_change_points fills plug-in sigmas and intervals") {
  auto uniform = DesignDistribution::uniform();
  KernelSpec k0 = make_kernel(0);
  const int n = 500;
  SampleSet s;
  s.t.resize(n);
  s.y.resize(n);
  for (int i = 0; i < n; ++i) {
    s.t[i] = (i + 0.5) / n;
    s.y[i] = s.t[i] - 0.5;
  }
  std::vector<double> grid;
  for (double t = 0.2; t <= 0.8; t += 0.005) grid.push_back(t);
  auto fit = gm_estimate_pair(s, uniform, k0, 0.15, grid);
  auto rep = extract_change_points(fit);
  REQUIRE(rep.count == 1);
  annotate_change_points(rep, fit, uniform, k0, 0.15, n, 0.3, 0.05);
  const auto& p = rep.points[rep.clusters[0].representative];
  CHECK(p.sigma_if_hat > 0);
  CHECK(p.uncertainty.lo < p.x_hat);
  CHECK(p.uncertainty.hi > p.x_hat);
  // plug-in slope is about 1, so the annotated sigma matches the formula
  double pred = sigma_if(1.0, p.x_hat, uniform, k0, 0.15, n, 0.3);
  CHECK(p.sigma_if_hat == doctest::Approx(pred).epsilon(0.05));
}
