#include <gtest/gtest.h>

#include <cmath>

#include "sigconc/errors.hpp"
#include "sigconc/gaussian.hpp"
#include "sigconc/stats.hpp"

using namespace sigconc;

namespace {

GaussianModel bm(int d = 1) { return GaussianModel{BrownianMotion{}, d}; }
GaussianModel fbm(double h, int d = 1) { return GaussianModel{FractionalBrownianMotion{h}, d}; }
GaussianModel ou(double theta, OuStart start, int d = 1) { return GaussianModel{OrnsteinUhlenbeck{theta, start}, d}; }

// Sample covariance of knot values (mean known to be zero) vs covariance(), within 4 SE.
void check_covariance(const GaussianModel& model, const SampleGrid& grid, std::size_t count, std::uint64_t seed) {
  const PathSampler sampler(model, grid);
  const std::size_t n = static_cast<std::size_t>(grid.n_steps) + 1;
  const std::size_t d = static_cast<std::size_t>(model.dim);
  std::vector<double> values(n * d);
  std::vector<std::vector<double>> products(n * n, std::vector<double>(count * d));
  for (std::size_t p = 0; p < count; ++p) {
    sampler.sample_values(SeedSpec{seed}, p, values);
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) products[i * n + j][p * d + c] = values[i * d + c] * values[j * d + c];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto est = stats::mean_with_se(products[i * n + j]);
      const double expected = covariance(model, grid.time(static_cast<int>(i)), grid.time(static_cast<int>(j)));
      if (expected == 0.0 && est.std_err == 0.0) {
        EXPECT_EQ(est.value, 0.0);
        continue;
      }
      EXPECT_NEAR(est.value, expected, 4 * est.std_err) << model.name() << " (" << i << "," << j << ")";
    }
}

}  // namespace

TEST(Covariance, Examples) {
  EXPECT_DOUBLE_EQ(covariance(bm(), 0.3, 0.7), 0.3);
  for (double s : {0.1, 0.5, 1.3})
    for (double t : {0.2, 0.5, 2.0}) EXPECT_NEAR(covariance(fbm(0.5), s, t), std::min(s, t), 1e-15);
  EXPECT_NEAR(covariance(ou(1.0, OuStart::Zero), 1, 1), 0.5 * (1 - std::exp(-2.0)), 1e-15);
  EXPECT_NEAR(covariance(ou(1.0, OuStart::Zero), 1, 1), 0.432332, 1e-6);
  EXPECT_NEAR(covariance(ou(2.0, OuStart::Stationary), 0.3, 1.0), 0.25 * std::exp(-1.4), 1e-15);
  EXPECT_NEAR(covariance(fbm(0.75), 2, 2), std::pow(2.0, 1.5), 1e-14);
}

TEST(Model, Validation) {
  EXPECT_THROW(fbm(0.0).validate(), DomainError);
  EXPECT_THROW(fbm(1.0).validate(), DomainError);
  EXPECT_THROW(ou(-1.0, OuStart::Zero).validate(), DomainError);
  EXPECT_THROW(bm(0).validate(), DomainError);
  try {
    ou(-1.0, OuStart::Zero).validate();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos);
  }
  EXPECT_TRUE(fbm(0.3).warnings().empty());
  EXPECT_FALSE(fbm(0.2).warnings().empty());
  EXPECT_DOUBLE_EQ(fbm(0.75).rho(), 1.0 / 1.5);
  EXPECT_DOUBLE_EQ(bm().rho(), 1.0);
  EXPECT_THROW((SampleGrid{0, 1.0}).validate(), DomainError);
  EXPECT_THROW((SampleGrid{4, 0.0}).validate(), DomainError);
  EXPECT_THROW(PathSampler(fbm(0.7), SampleGrid{kMaxFbmSteps + 1, 1.0}), DomainError);
}

TEST(Sampler, EmpiricalCovarianceMatches) {
  const SampleGrid grid{7, 1.0};
  check_covariance(bm(2), grid, 25000, 101);
  check_covariance(fbm(0.75), grid, 50000, 102);
  check_covariance(fbm(0.3), grid, 50000, 103);
  check_covariance(ou(1.0, OuStart::Zero), grid, 50000, 104);
  check_covariance(ou(1.0, OuStart::Stationary), grid, 50000, 105);
}

TEST(Sampler, TerminalVariance) {
  for (const auto& [model, expected] : std::vector<std::pair<GaussianModel, double>>{
           {bm(), 1.0}, {fbm(0.75), 1.0}, {ou(1.0, OuStart::Zero), 0.432332}}) {
    const PathSampler sampler(model, SampleGrid{model.name().rfind("fbm", 0) == 0 ? 16 : 1, 1.0});
    std::vector<double> sq(40000);
    for (std::size_t i = 0; i < sq.size(); ++i) {
      const Path p = sampler.sample(SeedSpec{7}, i);
      const double x = p.point(p.num_points() - 1)[0];
      sq[i] = x * x;
    }
    const auto est = stats::mean_with_se(sq);
    EXPECT_NEAR(est.value, expected, 4 * est.std_err) << model.name();
  }
}

TEST(Sampler, FbmIncrementStationarity) {
  const SampleGrid grid{16, 2.0};
  const PathSampler sampler(fbm(0.75), grid);
  const std::size_t count = 30000;
  std::vector<double> values(17);
  std::vector<std::vector<double>> sq(16, std::vector<double>(count));
  for (std::size_t p = 0; p < count; ++p) {
    sampler.sample_values(SeedSpec{9}, p, values);
    for (std::size_t k = 0; k < 16; ++k) sq[k][p] = std::pow(values[k + 1] - values[k], 2);
  }
  const double expected = std::pow(grid.step(), 1.5);
  for (std::size_t k = 0; k < 16; ++k) {
    const auto est = stats::mean_with_se(sq[k]);
    EXPECT_NEAR(est.value, expected, 4 * est.std_err) << "increment " << k;
  }
}

TEST(Sampler, SeedingContract) {
  const auto a = sample_paths(fbm(0.6, 2), SampleGrid{32, 1.0}, 20, SeedSpec{5}, 1);
  const auto b = sample_paths(fbm(0.6, 2), SampleGrid{32, 1.0}, 20, SeedSpec{5}, 3);
  const auto c = sample_paths(fbm(0.6, 2), SampleGrid{32, 1.0}, 20, SeedSpec{6}, 1);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  const PathSampler sampler(fbm(0.6, 2), SampleGrid{32, 1.0});
  EXPECT_EQ(sampler.sample(SeedSpec{5}, 13), a[13]);
  EXPECT_THROW(sample_paths(bm(), SampleGrid{4, 1.0}, 0, SeedSpec{1}), DomainError);
}

TEST(Sampler, PathsStartAtZeroUnlessStationary) {
  const auto a = sample_paths(ou(1.0, OuStart::Zero), SampleGrid{4, 1.0}, 3, SeedSpec{1});
  for (const auto& p : a) EXPECT_EQ(p.point(0)[0], 0.0);
  const auto b = sample_paths(ou(1.0, OuStart::Stationary), SampleGrid{4, 1.0}, 3, SeedSpec{1});
  for (const auto& p : b) EXPECT_NE(p.point(0)[0], 0.0);
}
