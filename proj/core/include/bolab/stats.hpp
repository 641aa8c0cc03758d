#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bolab {

/// Pairwise (cascade) summation. Result depends only on the element order.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);
/// Unbiased sample variance, two-pass.
double sample_variance(std::span<const double> values);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};
MeanEstimate estimate_mean(std::span<const double> values);

/// Normal quantile used by every "3 sigma" style check.
/// mean / std_error. Differences at floating-point roundoff relative to `scale`
/// count as exact agreement and give 0.
double z_score(double mean, double std_error, double scale);

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};
/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95);

/// Kolmogorov distribution survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value with the Stephens correction).
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Chi-square survival function P(X > x), X ~ chi^2(dof).
double chi_square_survival(double x, double dof);
/// Pearson chi-square goodness of fit against equal cell probabilities.
TestResult chi_square_uniform(std::span<const std::uint64_t> counts);

/// log(sum exp(x_i)); -inf entries are allowed.
double log_sum_exp(std::span<const double> values);

}  // namespace bolab
