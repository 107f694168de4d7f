#pragma once

#include <cstddef>
#include <span>

namespace sigconc::stats {

/// Pairwise (cascade) summation; the result depends only on the order of
/// the input, not on how it was produced.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

struct Estimate {
  double value = 0.0;
  double std_err = 0.0;
};

/// Sample mean with its delete-one jackknife standard error (for the mean
/// this equals the sample standard deviation over sqrt(n)).
Estimate mean_with_se(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit ols(std::span<const double> x, std::span<const double> y);

}  // namespace sigconc::stats
