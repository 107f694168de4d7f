#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sigconc {

/// A word over the alphabet {1..d}. Letters are 1-based throughout.
using Word = std::vector<int>;

/// Label used in CSV headers and Lie coordinate tables. Letters are
/// concatenated for d <= 9 ("112") and dot-separated otherwise ("1.10.2").
/// The empty word is written "()".
std::string word_to_string(std::span<const int> word, int d);
Word parse_word(std::string_view text, int d);

/// Number of coordinates of T^(m)(R^d), i.e. sum_{k=0}^{m} d^k.
std::size_t tensor_size(int d, int m);

/// Position of the first coordinate of level k in the canonical layout.
std::size_t level_offset(int d, int k);

/// Canonical index of a word: offset(k) + sum_j (i_j - 1) d^{k-j}.
std::size_t word_index(std::span<const int> word, int d);

/// Inverse of word_index.
Word word_at(std::size_t index, int d);

/// Element of the truncated tensor algebra T^(m)(R^d), stored densely
/// level by level with words in lexicographic order inside each level.
class TruncatedTensor {
 public:
  TruncatedTensor(int d, int m);
  TruncatedTensor(int d, int m, std::vector<double> coords);

  static TruncatedTensor unit(int d, int m);
  /// Level-1 tensor sum_i x_i e_i.
  static TruncatedTensor from_vector(std::span<const double> x, int m);
  static TruncatedTensor basis(const Word& word, int d, int m);

  int dim() const { return d_; }
  int depth() const { return m_; }
  std::size_t size() const { return coords_.size(); }

  std::span<const double> coords() const { return coords_; }
  std::span<double> coords() { return coords_; }

  std::span<const double> level(int k) const;
  std::span<double> level(int k);

  double operator[](const Word& word) const;
  double& operator[](const Word& word);

  bool same_shape(const TruncatedTensor& other) const {
    return d_ == other.d_ && m_ == other.m_;
  }

  TruncatedTensor& operator+=(const TruncatedTensor& rhs);
  TruncatedTensor& operator-=(const TruncatedTensor& rhs);
  TruncatedTensor& operator*=(double s);

  friend TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b) { return a += b; }
  friend TruncatedTensor operator-(TruncatedTensor a, const TruncatedTensor& b) { return a -= b; }
  friend TruncatedTensor operator*(TruncatedTensor a, double s) { return a *= s; }
  friend TruncatedTensor operator*(double s, TruncatedTensor a) { return a *= s; }

  bool operator==(const TruncatedTensor&) const = default;

  /// Throws NumericError if any coordinate is NaN or infinite.
  void ensure_finite(std::string_view context) const;

 private:
  void check_shape(const TruncatedTensor& other) const;

  int d_;
  int m_;
  std::vector<double> coords_;
};

/// Graded (concatenation) product; levels above m are dropped.
TruncatedTensor tensor_product(const TruncatedTensor& a, const TruncatedTensor& b);

/// exp(a) for a with zero scalar part.
TruncatedTensor tensor_exp(const TruncatedTensor& a);

/// log(g) for g with unit scalar part.
TruncatedTensor tensor_log(const TruncatedTensor& g);

/// In-place acc <- acc ⊗ exp(dx) for a level-1 increment dx, by Horner's
/// scheme. Never materializes exp(dx).
void multiply_by_segment_exp(TruncatedTensor& acc, std::span<const double> dx);

/// Euclidean (Hilbert-Schmidt) norm of a single level.
double level_norm(const TruncatedTensor& a, int k);

struct UnitWeights {};
struct FactorialWeights {};
struct GeometricFactorialWeights {
  double beta;
};
/// w_k = 1 / (k! scale^{k/2}), scale standing in for the covariance variation norm.
struct OptimalWeights {
  double scale;
};

using WeightScheme = std::variant<UnitWeights, FactorialWeights, GeometricFactorialWeights, OptimalWeights>;

/// Weights w_0..w_m. Throws DomainError for non-positive beta or scale.
std::vector<double> level_weights(const WeightScheme& scheme, int m);

std::string scheme_name(const WeightScheme& scheme);

/// max_k w_k ||a^(k)||.
double weighted_norm(const TruncatedTensor& a, const WeightScheme& scheme);
double weighted_norm(const TruncatedTensor& a, std::span<const double> weights);

/// Tensor CSV: header `d,m,<word labels>` followed by one row per tensor.
void write_tensor_csv(std::ostream& out, std::span<const TruncatedTensor> tensors);
std::vector<TruncatedTensor> read_tensor_csv(std::istream& in);

}  // namespace sigconc
