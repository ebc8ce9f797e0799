#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace pforest {

struct KsResult {
  double statistic = 0.0;  // sup-norm distance D_n
  double p_value = 1.0;
  std::size_t n = 0;       // effective sample size behind the p-value
};

// Complement of the Kolmogorov distribution, Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_sf(double x);

// One-sample Kolmogorov-Smirnov against a continuous CDF. The p-value uses the
// asymptotic Kolmogorov distribution with the usual finite-n correction
// (sqrt(n) + 0.12 + 0.11/sqrt(n)); approximate for small n.
KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov; ties are handled by comparing the empirical
// CDFs between distinct values only. Same asymptotic p-value with
// n = n1*n2/(n1+n2).
KsResult two_sample_ks(std::span<const double> a, std::span<const double> b);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Survival function of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double stat, int df);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
};
MeanStderr mean_stderr(std::span<const double> xs);

// Wilson score interval upper endpoint for a binomial proportion at normal
// quantile z. Monotone in z, well behaved at 0 and n successes.
double wilson_upper(std::size_t successes, std::size_t trials, double z);

// CDF of an Exponential(rate) law.
double exponential_cdf(double rate, double x);

// CDF of one coordinate of a uniform draw from the unit ball in `dim`
// dimensions (dim in [1, 4]).
double ball_coordinate_cdf(int dim, double x);

// Volume of the unit ball in `dim` dimensions (dim in [1, 4]).
double unit_ball_volume(int dim);

}  // namespace pforest
