#include "pforest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "pforest/errors.hpp"

namespace pforest {

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double n_eff) {
  const double sq = std::sqrt(n_eff);
  return kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
}

}  // namespace

KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ValidationError("ks_test needs a non-empty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return KsResult{d, ks_p_value(d, n), xs.size()};
}

KsResult two_sample_ks(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ValidationError("two_sample_ks needs non-empty samples");
  std::vector<double> xs(a.begin(), a.end());
  std::vector<double> ys(b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double na = static_cast<double>(xs.size());
  const double nb = static_cast<double>(ys.size());
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= v) ++i;
    while (j < ys.size() && ys[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double n_eff = na * nb / (na + nb);
  return KsResult{d, ks_p_value(d, n_eff), static_cast<std::size_t>(n_eff)};
}

namespace {

// Lanczos-free lgamma: the standard library one is fine here.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw ValidationError("gamma_p requires x >= 0, a > 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi_square_sf(double stat, int df) {
  if (df <= 0) throw ValidationError("chi_square_sf requires df > 0");
  if (stat <= 0.0) return 1.0;
  return 1.0 - gamma_p(0.5 * df, 0.5 * stat);
}

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / (static_cast<double>(xs.size() - 1) * static_cast<double>(xs.size())));
  }
  return out;
}

double exponential_cdf(double rate, double x) {
  return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x);
}

double ball_coordinate_cdf(int dim, double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double pi = std::numbers::pi;
  switch (dim) {
    case 1:
      return 0.5 * (x + 1.0);
    case 2:
      return 0.5 + (x * std::sqrt(1.0 - x * x) + std::asin(x)) / pi;
    case 3:
      return 0.5 + 0.25 * (3.0 * x - x * x * x);
    case 4: {
      // Density proportional to (1 - x^2)^{3/2}; normalizer 3*pi/8.
      const double s = std::sqrt(1.0 - x * x);
      const double integral = 0.25 * x * s * s * s + 0.375 * (x * s + std::asin(x));
      return 0.5 + integral / (3.0 * pi / 8.0);
    }
    default:
      throw ValidationError("ball_coordinate_cdf supports dimensions 1..4");
  }
}

double unit_ball_volume(int dim) {
  const double pi = std::numbers::pi;
  switch (dim) {
    case 1:
      return 2.0;
    case 2:
      return pi;
    case 3:
      return 4.0 * pi / 3.0;
    case 4:
      return pi * pi / 2.0;
    default:
      throw ValidationError("unit_ball_volume supports dimensions 1..4");
  }
}


double wilson_upper(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return 1.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = p + z2 / (2.0 * n);
  const double rad = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return (center + rad) / (1.0 + z2 / n);
}

}  // namespace pforest
