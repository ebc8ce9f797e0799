#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pforest/stats.hpp"

using namespace pforest;

namespace {

// Simpson integration of f over [a, b]; n must be even.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int k = 1; k < n; ++k) acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("kolmogorov survival function") {
  // series evaluated by hand: Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2)
  CHECK(kolmogorov_sf(1.358) == doctest::Approx(0.050027).epsilon(1e-3));
  CHECK(kolmogorov_sf(1.628) == doctest::Approx(0.0099755).epsilon(1e-3));
  CHECK(kolmogorov_sf(0.4) == doctest::Approx(0.997194).epsilon(1e-3));
  CHECK(kolmogorov_sf(0.0) == 1.0);
  CHECK(kolmogorov_sf(5.0) == doctest::Approx(0.0).epsilon(1e-9));
  // strictly decreasing on the bulk
  double last = 1.0;
  for (double x = 0.3; x < 2.5; x += 0.1) {
    const double q = kolmogorov_sf(x);
    CHECK(q < last);
    last = q;
  }
}

TEST_CASE("one-sample KS on a hand-checked configuration") {
  // ten perfectly spread uniforms: empirical CDF within 0.05 everywhere
  std::vector<double> xs;
  for (int k = 0; k < 10; ++k) xs.push_back(0.05 + 0.1 * k);
  const KsResult r = ks_test(xs, [](double x) { return x; });
  CHECK(r.statistic == doctest::Approx(0.05));
  CHECK(r.n == 10);
  CHECK(r.p_value > 0.99);

  // a sample crammed into [0, 0.5] against U(0,1): D = 0.5
  std::vector<double> low;
  for (int k = 0; k < 50; ++k) low.push_back(0.25 + 0.005 * k);
  const KsResult bad = ks_test(low, [](double x) { return x; });
  CHECK(bad.statistic >= 0.5);
  CHECK(bad.p_value < 1e-6);
}

TEST_CASE("two-sample KS handles ties") {
  const std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> b = {1.5, 2.5, 3.5, 4.5};
  const KsResult r = two_sample_ks(a, b);
  CHECK(r.statistic == doctest::Approx(0.25));

  const std::vector<double> ta = {1.0, 1.0, 2.0, 3.0};
  const std::vector<double> tb = {1.0, 2.0, 2.0, 3.0};
  const KsResult t = two_sample_ks(ta, tb);
  CHECK(t.statistic == doctest::Approx(0.25));

  // identical samples cannot be distinguished
  const KsResult same = two_sample_ks(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0));
}

TEST_CASE("incomplete gamma and chi-square") {
  CHECK(gamma_p(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(gamma_p(0.5, 1.0) == doctest::Approx(std::erf(1.0)));
  CHECK(gamma_p(3.0, 0.0) == 0.0);

  CHECK(chi_square_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)));
  CHECK(chi_square_sf(3.841, 1) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(chi_square_sf(0.0, 4) == 1.0);
}

TEST_CASE("mean and standard error") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0, 5.0};
  const MeanStderr m = mean_stderr(xs);
  CHECK(m.mean == 3.0);
  CHECK(m.stderr_ == doctest::Approx(std::sqrt(0.5)));
  CHECK(m.n == 5);

  const MeanStderr single = mean_stderr(std::vector<double>{7.0});
  CHECK(single.mean == 7.0);
  CHECK(single.n == 1);
}

TEST_CASE("exponential cdf") {
  CHECK(exponential_cdf(2.0, 0.5) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(exponential_cdf(1.0, 0.0) == 0.0);
  CHECK(exponential_cdf(1.0, -1.0) == 0.0);
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(unit_ball_volume(4) == doctest::Approx(kPi * kPi / 2.0));
}

TEST_CASE("ball coordinate cdf matches direct integration") {
  for (int dim = 1; dim <= 4; ++dim) {
    CHECK(ball_coordinate_cdf(dim, -1.0) == doctest::Approx(0.0));
    CHECK(ball_coordinate_cdf(dim, 1.0) == doctest::Approx(1.0));
    CHECK(ball_coordinate_cdf(dim, 0.0) == doctest::Approx(0.5));
    CHECK(ball_coordinate_cdf(dim, -2.0) == 0.0);
    CHECK(ball_coordinate_cdf(dim, 2.0) == 1.0);

    // density of one coordinate is proportional to (1 - x^2)^((dim-1)/2)
    const double exponent = 0.5 * (dim - 1);
    const auto dens = [exponent](double u) { return std::pow(1.0 - u * u, exponent); };
    const double norm = simpson(dens, -1.0, 1.0, 4000);
    for (double x : {-0.8, -0.3, 0.2, 0.6, 0.95}) {
      const double expect = simpson(dens, -1.0, x, 4000) / norm;
      CHECK(ball_coordinate_cdf(dim, x) == doctest::Approx(expect).epsilon(1e-5));
    }
  }
}

TEST_CASE("wilson upper bound") {
  const double z = 2.5758293035489004;  // two-sided 99%
  CHECK(wilson_upper(0, 0, z) == 1.0);
  // p-hat = 0: upper = (z^2/n) / (1 + z^2/n)
  const double z2 = z * z;
  CHECK(wilson_upper(0, 100, z) == doctest::Approx((z2 / 100.0) / (1.0 + z2 / 100.0)));
  CHECK(wilson_upper(100, 100, z) == doctest::Approx(1.0));

  // monotone in the success count, shrinking in the sample size
  double last = 0.0;
  for (std::size_t s = 0; s <= 50; s += 5) {
    const double u = wilson_upper(s, 50, z);
    CHECK(u > last);
    last = u;
  }
  CHECK(wilson_upper(10, 100, z) > wilson_upper(100, 1000, z));
  // wider at higher confidence
  CHECK(wilson_upper(10, 100, 2.5758) > wilson_upper(10, 100, 1.96));
  // always contains the point estimate
  CHECK(wilson_upper(46, 10000, z) > 0.0046);
}
