#include <gtest/gtest.h>

#include <cmath>

#include "sigconc/rng.hpp"
#include "sigconc/stats.hpp"

using namespace sigconc;

// Known-answer vectors from the Random123 distribution (philox4x32_10).
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}),
            (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, DeterministicAndDistinct) {
  RandomStream a(42, 7), b(42, 7), c(42, 8), e(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, e.next_u64());
  }
}

TEST(RandomStream, UniformInOpenInterval) {
  RandomStream r(1, 0);
  std::vector<double> xs(100000);
  for (auto& x : xs) {
    x = r.uniform();
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
  const auto m = stats::mean_with_se(xs);
  EXPECT_NEAR(m.value, 0.5, 4 * m.std_err);
}

TEST(RandomStream, NormalMoments) {
  RandomStream r(2, 0);
  std::vector<double> xs(200000), sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = r.normal();
    sq[i] = xs[i] * xs[i];
  }
  const auto m = stats::mean_with_se(xs);
  const auto v = stats::mean_with_se(sq);
  EXPECT_NEAR(m.value, 0.0, 4 * m.std_err);
  EXPECT_NEAR(v.value, 1.0, 4 * v.std_err);
}

TEST(RandomStream, BelowIsInRange) {
  RandomStream r(3, 0);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 4 * std::sqrt(10000 * 6.0 / 7.0));
}
