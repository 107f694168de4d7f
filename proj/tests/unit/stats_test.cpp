#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sigconc/errors.hpp"
#include "sigconc/io.hpp"
#include "sigconc/stats.hpp"

using namespace sigconc;

TEST(Stats, PairwiseSum) {
  std::vector<double> xs(1000);
  std::iota(xs.begin(), xs.end(), 1.0);
  EXPECT_EQ(stats::pairwise_sum(xs), 500500.0);
  EXPECT_EQ(stats::pairwise_sum({}), 0.0);
  std::vector<double> tiny(1 << 20, 0.1);
  EXPECT_NEAR(stats::pairwise_sum(tiny), 0.1 * (1 << 20), 1e-6);
}

TEST(Stats, JackknifeEqualsClassicalStandardError) {
  const std::vector<double> xs{1.0, 4.0, 2.0, 8.0, 5.0, 7.0};
  const auto e = stats::mean_with_se(xs);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  EXPECT_DOUBLE_EQ(e.value, mean);
  EXPECT_NEAR(e.std_err, std::sqrt(ss / (xs.size() - 1) / xs.size()), 1e-14);
}

TEST(Stats, OlsExactLine) {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = stats::ols(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
  EXPECT_EQ(f.points, 4u);
  const std::vector<double> flat{1, 1, 1};
  EXPECT_THROW(stats::ols(flat, flat), NumericError);
}

TEST(Io, FormatAndParse) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(1.0), "1");
  for (double v : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23}) EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  EXPECT_EQ(io::parse_double(" +1.5 "), 1.5);
  EXPECT_THROW(io::parse_double("1.5x"), DomainError);
  EXPECT_THROW(io::parse_double("nan"), DomainError);
  EXPECT_THROW(io::parse_double(""), DomainError);
  EXPECT_EQ(io::parse_int("42"), 42);
  EXPECT_THROW(io::parse_int("4.2"), DomainError);
  const auto f = io::split_csv_line("a, b ,c");
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[1], "b");
}
