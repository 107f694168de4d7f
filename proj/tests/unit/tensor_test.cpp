#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracle.hpp"
#include "sigconc/errors.hpp"
#include "sigconc/tensor.hpp"

using namespace sigconc;

TEST(WordIndex, Examples) {
  EXPECT_EQ(word_index(Word{}, 2), 0u);
  EXPECT_EQ(word_index(Word{2}, 2), 2u);
  EXPECT_EQ(word_index(Word{1, 2}, 2), 4u);
  EXPECT_THROW(word_index(Word{3}, 2), DomainError);
  EXPECT_THROW(word_index(Word{0, 1}, 2), DomainError);
}

TEST(WordIndex, BijectionExhaustive) {
  for (int d = 1; d <= 3; ++d)
    for (int m = 0; m <= 4; ++m) {
      const std::size_t n = tensor_size(d, m);
      for (std::size_t i = 0; i < n; ++i) {
        const Word w = word_at(i, d);
        ASSERT_LE(static_cast<int>(w.size()), m);
        ASSERT_EQ(word_index(w, d), i);
      }
    }
}

TEST(WordIndex, LexicographicWithinLevel) {
  const int d = 3;
  for (int k = 1; k <= 3; ++k)
    for (std::size_t i = level_offset(d, k) + 1; i < level_offset(d, k + 1); ++i)
      EXPECT_LT(word_at(i - 1, d), word_at(i, d));
}

TEST(TruncatedTensor, SizeFormula) {
  EXPECT_EQ(tensor_size(1, 4), 5u);
  EXPECT_EQ(tensor_size(2, 3), 15u);
  EXPECT_EQ(tensor_size(3, 2), 13u);
  EXPECT_EQ(TruncatedTensor(4, 3).size(), (256u - 1u) / 3u);
}

TEST(WordLabels, RoundTrip) {
  EXPECT_EQ(word_to_string(Word{}, 2), "()");
  EXPECT_EQ(word_to_string(Word{1, 1, 2}, 2), "112");
  EXPECT_EQ(word_to_string(Word{1, 10, 2}, 12), "1.10.2");
  EXPECT_EQ(parse_word("1.10.2", 12), (Word{1, 10, 2}));
  EXPECT_EQ(parse_word("112", 2), (Word{1, 1, 2}));
  EXPECT_EQ(parse_word("()", 2), Word{});
  EXPECT_THROW(parse_word("13", 2), DomainError);
}

TEST(TensorProduct, Examples) {
  const int d = 2, m = 2;
  const auto one = TruncatedTensor::unit(d, m);
  const auto e1 = TruncatedTensor::basis({1}, d, m);
  const auto e2 = TruncatedTensor::basis({2}, d, m);
  const auto p = tensor_product(one + e1, one + e2);
  TruncatedTensor expected = one + e1 + e2 + TruncatedTensor::basis({1, 2}, d, m);
  EXPECT_EQ(p, expected);

  const auto ee = tensor_product(e1, e1);
  EXPECT_EQ(ee, TruncatedTensor::basis({1, 1}, d, m));

  std::mt19937_64 gen(1);
  const auto a = oracle::random_tensor(d, m, gen, 0.7);
  EXPECT_EQ(tensor_product(a, one), a);
  EXPECT_EQ(tensor_product(one, a), a);
}

TEST(TensorProduct, ShapeMismatch) {
  EXPECT_THROW(tensor_product(TruncatedTensor(2, 2), TruncatedTensor(2, 3)), DomainError);
  EXPECT_THROW(tensor_product(TruncatedTensor(2, 2), TruncatedTensor(3, 2)), DomainError);
}

TEST(TensorProduct, MatchesSparseOracle) {
  std::mt19937_64 gen(2);
  for (int d = 1; d <= 3; ++d)
    for (int m = 1; m <= 4; ++m) {
      const auto a = oracle::random_tensor(d, m, gen, 0.3);
      const auto b = oracle::random_tensor(d, m, gen, -1.2);
      const auto p = tensor_product(a, b);
      const auto ref = oracle::product(oracle::from_tensor(a), oracle::from_tensor(b), m);
      for (std::size_t i = 0; i < p.size(); ++i)
        EXPECT_NEAR(p.coords()[i], oracle::coeff(ref, word_at(i, d)), 1e-12);
    }
}

TEST(TensorProduct, Associativity) {
  std::mt19937_64 gen(3);
  for (int d = 1; d <= 3; ++d)
    for (int m = 1; m <= 5; ++m)
      for (int rep = 0; rep < 5; ++rep) {
        const auto a = oracle::random_tensor(d, m, gen, 1.0);
        const auto b = oracle::random_tensor(d, m, gen, 0.5);
        const auto c = oracle::random_tensor(d, m, gen, -0.3);
        const auto lhs = tensor_product(tensor_product(a, b), c);
        const auto rhs = tensor_product(a, tensor_product(b, c));
        const double scale = oracle::max_abs(a) * oracle::max_abs(b) * oracle::max_abs(c) + 1.0;
        EXPECT_LE(oracle::max_abs_diff(lhs, rhs), 1e-10 * scale);
      }
}

TEST(TensorExp, Examples) {
  const int d = 2, m = 2;
  const auto e1 = TruncatedTensor::basis({1}, d, m);
  const auto e2 = TruncatedTensor::basis({2}, d, m);
  auto expected = TruncatedTensor::unit(d, m) + e1 + 0.5 * TruncatedTensor::basis({1, 1}, d, m);
  EXPECT_EQ(tensor_exp(e1), expected);
  EXPECT_EQ(tensor_exp(TruncatedTensor(d, m)), TruncatedTensor::unit(d, m));

  const auto g = tensor_exp(e1 + e2);
  for (const Word& w : {Word{1, 1}, Word{1, 2}, Word{2, 1}, Word{2, 2}}) EXPECT_DOUBLE_EQ(g[w], 0.5);
  EXPECT_THROW(tensor_exp(TruncatedTensor::unit(d, m)), DomainError);
}

TEST(TensorExp, MatchesSparseOracle) {
  std::mt19937_64 gen(4);
  const int d = 3, m = 4;
  const auto a = oracle::random_tensor(d, m, gen);
  const auto g = tensor_exp(a);
  const auto ref = oracle::exp(oracle::from_tensor(a), m);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g.coords()[i], oracle::coeff(ref, word_at(i, d)), 1e-11);
}

TEST(TensorLog, Examples) {
  const int d = 2, m = 2;
  EXPECT_EQ(tensor_log(TruncatedTensor::unit(d, m)), TruncatedTensor(d, m));
  const auto e1 = TruncatedTensor::basis({1}, d, m);
  const auto e2 = TruncatedTensor::basis({2}, d, m);
  EXPECT_LE(oracle::max_abs_diff(tensor_log(tensor_exp(e1)), e1), 1e-12);

  const auto l = tensor_log(tensor_product(tensor_exp(e1), tensor_exp(e2)));
  const auto expected = e1 + e2 + 0.5 * (TruncatedTensor::basis({1, 2}, d, m) - TruncatedTensor::basis({2, 1}, d, m));
  EXPECT_LE(oracle::max_abs_diff(l, expected), 1e-15);

  EXPECT_THROW(tensor_log(TruncatedTensor(d, m)), DomainError);
  EXPECT_THROW(tensor_log(2.0 * TruncatedTensor::unit(d, m)), DomainError);
}

TEST(TensorLog, RoundTrip) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 1 + rep % 3;
    const int m = 1 + rep % 5;
    TruncatedTensor a(d, m);
    for (std::size_t i = 1; i < a.size(); ++i) a.coords()[i] = u(gen);
    const auto g = tensor_exp(a);
    EXPECT_EQ(g.coords()[0], 1.0);
    EXPECT_LE(oracle::max_abs_diff(tensor_log(g), a), 1e-10);
    EXPECT_LE(oracle::max_abs_diff(tensor_exp(tensor_log(g)), g), 1e-10 * (1.0 + oracle::max_abs(g)));
  }
}

TEST(SegmentExp, MatchesProductWithExp) {
  std::mt19937_64 gen(6);
  for (int d = 1; d <= 3; ++d)
    for (int m = 1; m <= 5; ++m) {
      auto acc = oracle::random_tensor(d, m, gen, 1.0);
      std::vector<double> dx(static_cast<std::size_t>(d));
      std::normal_distribution<double> n;
      for (auto& x : dx) x = n(gen);
      const auto expected = tensor_product(acc, tensor_exp(TruncatedTensor::from_vector(dx, m)));
      multiply_by_segment_exp(acc, dx);
      EXPECT_LE(oracle::max_abs_diff(acc, expected), 1e-12 * (1.0 + oracle::max_abs(expected)));
    }
}

TEST(WeightedNorm, Examples) {
  EXPECT_DOUBLE_EQ(weighted_norm(TruncatedTensor::basis({1}, 2, 2), UnitWeights{}), 1.0);
  EXPECT_DOUBLE_EQ(weighted_norm(TruncatedTensor::unit(2, 2), FactorialWeights{}), 1.0);
  EXPECT_DOUBLE_EQ(weighted_norm(2.0 * TruncatedTensor::basis({1, 2}, 2, 2), FactorialWeights{}), 1.0);
  EXPECT_DOUBLE_EQ(weighted_norm(TruncatedTensor(2, 3), FactorialWeights{}), 0.0);
}

TEST(WeightedNorm, SchemeWeights) {
  EXPECT_EQ(level_weights(UnitWeights{}, 2), (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(level_weights(FactorialWeights{}, 3), (std::vector<double>{1, 1, 0.5, 1.0 / 6}));
  const auto g = level_weights(GeometricFactorialWeights{2.0}, 3);
  EXPECT_DOUBLE_EQ(g[1], 2.0);
  EXPECT_DOUBLE_EQ(g[2], 2.0);
  EXPECT_DOUBLE_EQ(g[3], 8.0 / 6.0);
  EXPECT_THROW(level_weights(GeometricFactorialWeights{0.0}, 2), DomainError);
  EXPECT_THROW(level_weights(OptimalWeights{-1.0}, 2), DomainError);
}

TEST(WeightedNorm, TriangleAndHomogeneity) {
  std::mt19937_64 gen(7);
  const std::vector<WeightScheme> schemes{UnitWeights{}, FactorialWeights{}, GeometricFactorialWeights{0.7},
                                          OptimalWeights{2.5}};
  for (const auto& s : schemes)
    for (int rep = 0; rep < 50; ++rep) {
      const auto a = oracle::random_tensor(2, 4, gen, 0.2);
      const auto b = oracle::random_tensor(2, 4, gen, -0.4);
      const double lambda = -3.25;
      EXPECT_LE(weighted_norm(a + b, s), (weighted_norm(a, s) + weighted_norm(b, s)) * (1 + 1e-15));
      EXPECT_NEAR(weighted_norm(lambda * a, s), std::abs(lambda) * weighted_norm(a, s),
                  1e-15 * weighted_norm(a, s) * 4);
    }
}

TEST(TensorCsv, RoundTrip) {
  std::mt19937_64 gen(8);
  std::vector<TruncatedTensor> ts{oracle::random_tensor(2, 3, gen, 1.0), oracle::random_tensor(2, 3, gen, 1.0)};
  std::stringstream buf;
  write_tensor_csv(buf, ts);
  const std::string text = buf.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "path_id,d,m,(),1,2,11,12,21,22,111,112,121,122,211,212,221,222");
  const auto back = read_tensor_csv(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], ts[0]);
  EXPECT_EQ(back[1], ts[1]);
}

TEST(TensorCsv, RejectsBadHeader) {
  std::stringstream buf("d,m,(),2,1\n1,1,1,0,0\n");
  EXPECT_THROW(read_tensor_csv(buf), DomainError);
}

TEST(TruncatedTensor, EnsureFinite) {
  TruncatedTensor a(2, 2);
  a.coords()[3] = std::nan("");
  EXPECT_THROW(a.ensure_finite("test"), NumericError);
}
