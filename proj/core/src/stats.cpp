#include "sigconc/stats.hpp"

#include <cmath>
#include <vector>

#include "sigconc/errors.hpp"

namespace sigconc::stats {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
  if (values.empty()) throw DomainError("mean of empty sample");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

Estimate mean_with_se(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw DomainError("standard error needs at least two samples");
  const double mu = mean(values);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (values[i] - mu) * (values[i] - mu);
  const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  return {mu, std::sqrt(var / static_cast<double>(n))};
}

LinearFit ols(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw DomainError("ols needs matching inputs with at least two points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericError("ols: regressor has zero spread");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = n;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ssr += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return fit;
}

}  // namespace sigconc::stats
