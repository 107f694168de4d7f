#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sigconc/tensor.hpp"

namespace sigconc {

/// True iff the word is non-empty and strictly smaller than each of its proper rotations.
bool is_lyndon(std::span<const int> word);

class LyndonWord {
 public:
  /// Throws DomainError if `letters` is not a Lyndon word.
  explicit LyndonWord(Word letters);

  const Word& letters() const { return letters_; }
  int degree() const { return static_cast<int>(letters_.size()); }
  std::string str(int d) const { return word_to_string(letters_, d); }

  auto operator<=>(const LyndonWord&) const = default;

 private:
  Word letters_;
};

/// All Lyndon words of degree <= m over {1..d}, sorted by (degree, lexicographic).
/// Generated with Duval's algorithm.
std::vector<LyndonWord> lyndon_words(int d, int m);

/// Dimension of the degree-k part of the free Lie algebra on d generators,
/// (1/k) sum_{e | k} mu(e) d^{k/e}.
std::uint64_t witt_dimension(int d, int k);

/// Binary bracket tree. A leaf carries a letter; an inner node has exactly two children.
struct BracketTree {
  int letter = 0;
  std::vector<BracketTree> children;

  bool is_leaf() const { return children.empty(); }
  int degree() const;
  /// "1", "[1,2]", "[1,[1,2]]".
  std::string str() const;

  static BracketTree leaf(int letter) { return BracketTree{letter, {}}; }
  static BracketTree bracket(BracketTree left, BracketTree right);
};

/// Standard bracketing: w = u v with v the longest proper Lyndon suffix,
/// recursively. Throws DomainError on non-Lyndon input.
BracketTree standard_bracketing(const Word& word);

/// Expands nested commutators [a,b] = a⊗b - b⊗a into a homogeneous tensor.
TruncatedTensor bracket_to_tensor(const BracketTree& tree, int d, int m);

/// Lyndon basis of the truncated free Lie algebra, with the tensor expansion
/// of each standard bracketing. Built once per (d, m) and shared read-only.
class LieBasis {
 public:
  using Term = std::pair<std::size_t, double>;  // (index within level, coefficient)

  LieBasis(int d, int m);

  int dim() const { return d_; }
  int depth() const { return m_; }
  std::size_t size() const { return words_.size(); }

  const std::vector<LyndonWord>& words() const { return words_; }
  const LyndonWord& word(std::size_t i) const { return words_[i]; }

  /// Basis indices of degree k occupy [degree_begin(k), degree_begin(k+1)).
  std::size_t degree_begin(int k) const { return degree_start_[static_cast<std::size_t>(k)]; }

  /// Nonzero level coordinates of the bracketing, in increasing word order.
  /// The first term is always (index of the word itself, 1).
  std::span<const Term> expansion(std::size_t i) const { return expansions_[i]; }

  /// Index of a Lyndon word; throws DomainError if absent.
  std::size_t find(const Word& word) const;

 private:
  int d_;
  int m_;
  std::vector<LyndonWord> words_;
  std::vector<std::size_t> degree_start_;
  std::vector<std::vector<Term>> expansions_;
};

/// Cached, thread-safe access to the basis for (d, m).
std::shared_ptr<const LieBasis> lie_basis(int d, int m);

/// Coefficients of a Lie element in the Lyndon basis, graded by degree 1..m.
class LieCoordinates {
 public:
  explicit LieCoordinates(std::shared_ptr<const LieBasis> basis);
  LieCoordinates(std::shared_ptr<const LieBasis> basis, std::vector<double> coefficients);

  static LieCoordinates zeros(int d, int m) { return LieCoordinates(lie_basis(d, m)); }

  int dim() const { return basis_->dim(); }
  int depth() const { return basis_->depth(); }
  std::size_t size() const { return coeffs_.size(); }
  const LieBasis& basis() const { return *basis_; }

  std::span<const double> coefficients() const { return coeffs_; }
  std::span<double> coefficients() { return coeffs_; }

  double coefficient(const Word& word) const { return coeffs_[basis_->find(word)]; }
  double& coefficient(const Word& word) { return coeffs_[basis_->find(word)]; }

  /// (word, coefficient) pairs of one degree in canonical order.
  std::vector<std::pair<LyndonWord, double>> entries(int degree) const;

 private:
  std::shared_ptr<const LieBasis> basis_;
  std::vector<double> coeffs_;
};

/// Projects a tensor with zero scalar part onto the Lyndon basis by a
/// unitriangular solve per degree. Throws NotLieElement if the residual of
/// some degree exceeds tol * (1 + ||a^(k)||).
LieCoordinates tensor_to_lyndon(const TruncatedTensor& a, double tol = 1e-8);

TruncatedTensor lyndon_to_tensor(const LieCoordinates& c);

/// Truncated BCH product, log(exp(A) ⊗ exp(B)) evaluated in the tensor algebra.
LieCoordinates bch(const LieCoordinates& a, const LieCoordinates& b);

/// CSV with columns degree,word,coefficient (path_id first when several).
void write_lie_csv(std::ostream& out, std::span<const LieCoordinates> coords);
std::vector<LieCoordinates> read_lie_csv(std::istream& in);

}  // namespace sigconc
