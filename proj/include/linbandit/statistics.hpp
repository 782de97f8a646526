// Small statistical helpers for Monte Carlo checks.
#pragma once

#include <span>
#include <vector>

namespace linbandit {

struct KsResult {
  double statistic = 0.0;  // sup |F_a - F_b|
  double p_value = 1.0;    // asymptotic Kolmogorov tail with Stephens' correction
};

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

double median(std::vector<double> values);

/// Sample mean and unbiased variance.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments moments(std::span<const double> values);

/// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace linbandit
