#include "pcfit/math_util.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace pcfit {

namespace {

double simpson_fixed(const std::function<double(double)>& f, double a, double b, int n) {
  // n panels, n even
  const double h = (b - a) / n;
  CompensatedSum s;
  s.add(f(a));
  s.add(f(b));
  for (int i = 1; i < n; i += 2) s.add(4.0 * f(a + i * h));
  for (int i = 2; i < n; i += 2) s.add(2.0 * f(a + i * h));
  return s.value() * h / 3.0;
}

}  // namespace

double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                         double tol, int min_panels, int max_panels) {
  if (!(b >= a)) throw std::invalid_argument("integrate_simpson: b < a");
  if (a == b) return 0.0;
  int n = std::max(4, min_panels);
  if (n % 2) ++n;
  double prev = simpson_fixed(f, a, b, n);
  while (n < max_panels) {
    n *= 2;
    double cur = simpson_fixed(f, a, b, n);
    double scale = std::max({1.0, std::abs(cur), std::abs(prev)});
    if (std::abs(cur - prev) <= tol * scale) return cur;
    prev = cur;
  }
  return prev;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (n < 1 || lo <= 0 || hi <= 0) throw std::invalid_argument("logspace: bad arguments");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(la + (lb - la) * i / (n - 1));
  return out;
}

double interp_uniform(double x0, double dx, std::span<const double> values, double x) {
  if (values.empty()) throw std::invalid_argument("interp_uniform: empty grid");
  if (values.size() == 1) return values[0];
  double u = (x - x0) / dx;
  if (u <= 0) return values.front();
  if (u >= static_cast<double>(values.size() - 1)) return values.back();
  auto j = static_cast<std::size_t>(u);
  double a = u - static_cast<double>(j);
  return (1.0 - a) * values[j] + a * values[j + 1];
}

double interp_sorted(std::span<const double> xs, std::span<const double> ys, double x) {
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("interp_sorted: bad sizes");
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t j = static_cast<std::size_t>(it - xs.begin()) - 1;
  double a = (x - xs[j]) / (xs[j + 1] - xs[j]);
  return (1.0 - a) * ys[j] + a * ys[j + 1];
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty");
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance: need n >= 2");
  double m = mean(xs);
  CompensatedSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(xs.size() - 1);
}

OlsLine ols_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("ols_line: need matched inputs, n >= 3");
  const auto n = static_cast<double>(x.size());
  double mx = mean(x), my = mean(y);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("ols_line: degenerate abscissae");
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - intercept - slope * x[i];
    rss += r * r;
  }
  double se = std::sqrt(rss / (n - 2.0) / sxx);
  return {slope, intercept, se};
}

std::vector<double> solve_spd_dense(std::vector<std::vector<double>> a,
                                    std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n) throw std::invalid_argument("solve_spd_dense: shape mismatch");
  // in-place Cholesky, lower triangle
  for (std::size_t k = 0; k < n; ++k) {
    double d = a[k][k];
    for (std::size_t j = 0; j < k; ++j) d -= a[k][j] * a[k][j];
    if (!(d > 0)) throw std::runtime_error("solve_spd_dense: matrix not positive definite");
    a[k][k] = std::sqrt(d);
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = a[i][k];
      for (std::size_t j = 0; j < k; ++j) v -= a[i][j] * a[k][j];
      a[i][k] = v / a[k][k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) b[i] -= a[i][j] * b[j];
    b[i] /= a[i][i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) b[ii] -= a[j][ii] * b[j];
    b[ii] /= a[ii][ii];
  }
  return b;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t want = threads > 0 ? static_cast<std::size_t>(threads)
                                 : std::max(1u, hw);
  want = std::min(want, n);
  if (want <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  pool.reserve(want);
  for (std::size_t w = 0; w < want; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace pcfit
