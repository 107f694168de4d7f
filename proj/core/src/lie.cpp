#include "sigconc/lie.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>

#include "sigconc/errors.hpp"
#include "sigconc/io.hpp"

namespace sigconc {

bool is_lyndon(std::span<const int> word) {
  const std::size_t n = word.size();
  if (n == 0) return false;
  for (std::size_t r = 1; r < n; ++r) {
    // Compare word with its rotation starting at r.
    for (std::size_t i = 0; i < n; ++i) {
      const int a = word[i];
      const int b = word[(r + i) % n];
      if (a < b) break;
      if (a > b || i + 1 == n) return false;
    }
  }
  return true;
}

LyndonWord::LyndonWord(Word letters) : letters_(std::move(letters)) {
  if (!is_lyndon(letters_)) throw DomainError("not a Lyndon word: " + word_to_string(letters_, 10));
}

std::vector<LyndonWord> lyndon_words(int d, int m) {
  if (d < 1 || m < 1) throw DomainError("lyndon_words requires d >= 1 and m >= 1");
  std::vector<LyndonWord> out;
  Word w{1};
  while (!w.empty()) {
    out.emplace_back(w);
    const std::size_t n = w.size();
    while (static_cast<int>(w.size()) < m) w.push_back(w[w.size() - n]);
    while (!w.empty() && w.back() == d) w.pop_back();
    if (!w.empty()) ++w.back();
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const LyndonWord& a, const LyndonWord& b) { return a.degree() < b.degree(); });
  return out;
}

namespace {

int moebius(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      result = -result;
    }
  }
  if (n > 1) result = -result;
  return result;
}

}  // namespace

std::uint64_t witt_dimension(int d, int k) {
  if (d < 1 || k < 1) throw DomainError("witt_dimension requires d >= 1 and k >= 1");
  std::int64_t sum = 0;
  for (int e = 1; e <= k; ++e) {
    if (k % e != 0) continue;
    std::int64_t p = 1;
    for (int i = 0; i < k / e; ++i) p *= d;
    sum += moebius(e) * p;
  }
  return static_cast<std::uint64_t>(sum / k);
}

int BracketTree::degree() const {
  if (is_leaf()) return 1;
  return children[0].degree() + children[1].degree();
}

std::string BracketTree::str() const {
  if (is_leaf()) return std::to_string(letter);
  return "[" + children[0].str() + "," + children[1].str() + "]";
}

BracketTree BracketTree::bracket(BracketTree left, BracketTree right) {
  BracketTree t;
  t.children.push_back(std::move(left));
  t.children.push_back(std::move(right));
  return t;
}

BracketTree standard_bracketing(const Word& word) {
  if (!is_lyndon(word)) throw DomainError("standard_bracketing: not a Lyndon word");
  if (word.size() == 1) return BracketTree::leaf(word[0]);
  for (std::size_t i = 1; i < word.size(); ++i) {
    std::span<const int> suffix(word.data() + i, word.size() - i);
    if (is_lyndon(suffix)) {
      Word u(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(i));
      Word v(suffix.begin(), suffix.end());
      return BracketTree::bracket(standard_bracketing(u), standard_bracketing(v));
    }
  }
  // Unreachable: the last letter is always a Lyndon suffix.
  throw DomainError("standard_bracketing: no Lyndon suffix");
}

namespace {

// Dense coordinates of a homogeneous polynomial within its level.
struct Homogeneous {
  int degree;
  std::vector<double> coeffs;
};

Homogeneous expand(const BracketTree& tree, int d) {
  if (tree.is_leaf()) {
    if (tree.letter < 1 || tree.letter > d) throw DomainError("bracket letter outside alphabet");
    Homogeneous h{1, std::vector<double>(static_cast<std::size_t>(d), 0.0)};
    h.coeffs[static_cast<std::size_t>(tree.letter - 1)] = 1.0;
    return h;
  }
  const Homogeneous p = expand(tree.children[0], d);
  const Homogeneous q = expand(tree.children[1], d);
  const std::size_t np = p.coeffs.size();
  const std::size_t nq = q.coeffs.size();
  Homogeneous out{p.degree + q.degree, std::vector<double>(np * nq, 0.0)};
  for (std::size_t i = 0; i < np; ++i) {
    if (p.coeffs[i] == 0.0) continue;
    for (std::size_t j = 0; j < nq; ++j) {
      const double c = p.coeffs[i] * q.coeffs[j];
      if (c == 0.0) continue;
      out.coeffs[i * nq + j] += c;
      out.coeffs[j * np + i] -= c;
    }
  }
  return out;
}

}  // namespace

TruncatedTensor bracket_to_tensor(const BracketTree& tree, int d, int m) {
  const int degree = tree.degree();
  if (degree > m) throw DomainError("bracket degree " + std::to_string(degree) + " exceeds truncation level");
  const Homogeneous h = expand(tree, d);
  TruncatedTensor out(d, m);
  std::copy(h.coeffs.begin(), h.coeffs.end(), out.level(degree).begin());
  return out;
}

LieBasis::LieBasis(int d, int m) : d_(d), m_(m), words_(lyndon_words(d, m)) {
  for (int k = 0; k <= m + 1; ++k) {
    auto it = std::partition_point(words_.begin(), words_.end(),
                                   [k](const LyndonWord& w) { return w.degree() < k; });
    degree_start_.push_back(static_cast<std::size_t>(it - words_.begin()));
  }

  expansions_.reserve(words_.size());
  for (const auto& w : words_) {
    const Homogeneous h = expand(standard_bracketing(w.letters()), d);
    std::vector<Term> terms;
    for (std::size_t i = 0; i < h.coeffs.size(); ++i)
      if (h.coeffs[i] != 0.0) terms.emplace_back(i, h.coeffs[i]);
    const std::size_t self = word_index(w.letters(), d) - level_offset(d, w.degree());
    if (terms.empty() || terms.front().first != self || terms.front().second != 1.0)
      throw NumericError("Lyndon expansion of " + w.str(d) + " is not unitriangular");
    expansions_.push_back(std::move(terms));
  }
}

std::size_t LieBasis::find(const Word& word) const {
  const int k = static_cast<int>(word.size());
  if (k < 1 || k > m_) throw DomainError("word degree outside 1..m");
  auto first = words_.begin() + static_cast<std::ptrdiff_t>(degree_begin(k));
  auto last = words_.begin() + static_cast<std::ptrdiff_t>(degree_begin(k + 1));
  auto it = std::lower_bound(first, last, word, [](const LyndonWord& a, const Word& b) { return a.letters() < b; });
  if (it == last || it->letters() != word)
    throw DomainError("not a Lyndon basis word: " + word_to_string(word, d_));
  return static_cast<std::size_t>(it - words_.begin());
}

std::shared_ptr<const LieBasis> lie_basis(int d, int m) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const LieBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{d, m}];
  if (!slot) slot = std::make_shared<const LieBasis>(d, m);
  return slot;
}

LieCoordinates::LieCoordinates(std::shared_ptr<const LieBasis> basis)
    : basis_(std::move(basis)), coeffs_(basis_->size(), 0.0) {}

LieCoordinates::LieCoordinates(std::shared_ptr<const LieBasis> basis, std::vector<double> coefficients)
    : basis_(std::move(basis)), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != basis_->size()) throw DomainError("Lie coefficient count does not match basis size");
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw NumericError("non-finite Lie coefficient");
}

std::vector<std::pair<LyndonWord, double>> LieCoordinates::entries(int degree) const {
  std::vector<std::pair<LyndonWord, double>> out;
  for (std::size_t i = basis_->degree_begin(degree); i < basis_->degree_begin(degree + 1); ++i)
    out.emplace_back(basis_->word(i), coeffs_[i]);
  return out;
}

LieCoordinates tensor_to_lyndon(const TruncatedTensor& a, double tol) {
  if (a.coords()[0] != 0.0) throw DomainError("tensor_to_lyndon: scalar part must be 0");
  const int d = a.dim();
  const int m = a.depth();
  auto basis = lie_basis(d, m);
  std::vector<double> coeffs(basis->size(), 0.0);
  std::vector<double> residual;
  for (int k = 1; k <= m; ++k) {
    auto level = a.level(k);
    residual.assign(level.begin(), level.end());
    const std::size_t offset = level_offset(d, k);
    for (std::size_t b = basis->degree_begin(k); b < basis->degree_begin(k + 1); ++b) {
      const std::size_t self = word_index(basis->word(b).letters(), d) - offset;
      const double c = residual[self];
      coeffs[b] = c;
      if (c == 0.0) continue;
      for (const auto& [idx, v] : basis->expansion(b)) residual[idx] -= c * v;
    }
    double res2 = 0.0;
    for (double r : residual) res2 += r * r;
    const double bound = tol * (1.0 + level_norm(a, k));
    if (!(std::sqrt(res2) <= bound))
      throw NotLieElement("not a Lie element: degree-" + std::to_string(k) + " residual " +
                          io::format_double(std::sqrt(res2)) + " exceeds " + io::format_double(bound));
  }
  return LieCoordinates(std::move(basis), std::move(coeffs));
}

TruncatedTensor lyndon_to_tensor(const LieCoordinates& c) {
  const LieBasis& basis = c.basis();
  TruncatedTensor out(basis.dim(), basis.depth());
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const double coeff = c.coefficients()[b];
    if (coeff == 0.0) continue;
    auto level = out.level(basis.word(b).degree());
    for (const auto& [idx, v] : basis.expansion(b)) level[idx] += coeff * v;
  }
  return out;
}

LieCoordinates bch(const LieCoordinates& a, const LieCoordinates& b) {
  if (a.dim() != b.dim() || a.depth() != b.depth()) throw DomainError("bch: shape mismatch");
  const auto product = tensor_product(tensor_exp(lyndon_to_tensor(a)), tensor_exp(lyndon_to_tensor(b)));
  return tensor_to_lyndon(tensor_log(product));
}

void write_lie_csv(std::ostream& out, std::span<const LieCoordinates> coords) {
  if (coords.empty()) throw DomainError("write_lie_csv: nothing to write");
  const bool with_id = coords.size() > 1;
  out << (with_id ? "path_id,degree,word,coefficient\n" : "degree,word,coefficient\n");
  for (std::size_t row = 0; row < coords.size(); ++row) {
    const auto& c = coords[row];
    const LieBasis& basis = c.basis();
    for (std::size_t b = 0; b < basis.size(); ++b) {
      if (with_id) out << row << ',';
      out << basis.word(b).degree() << ',' << basis.word(b).str(basis.dim()) << ','
          << io::format_double(c.coefficients()[b]) << '\n';
    }
  }
}

std::vector<LieCoordinates> read_lie_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DomainError("Lie CSV: missing header");
  auto cols = io::split_csv_line(header);
  const bool with_id = !cols.empty() && cols[0] == "path_id";
  const std::size_t first = with_id ? 1 : 0;
  if (cols.size() != first + 3 || cols[first] != "degree" || cols[first + 1] != "word" ||
      cols[first + 2] != "coefficient")
    throw DomainError("Lie CSV: header must be [path_id,]degree,word,coefficient");

  struct Row {
    int degree;
    std::string word;
    double coeff;
  };
  std::map<long long, std::vector<Row>> groups;
  std::string line;
  while (std::getline(in, line)) {
    if (io::trim(line).empty()) continue;
    auto f = io::split_csv_line(line);
    if (f.size() != cols.size()) throw DomainError("Lie CSV: row has wrong number of fields");
    const long long id = with_id ? io::parse_int(f[0]) : 0;
    groups[id].push_back(
        {static_cast<int>(io::parse_int(f[first])), std::string(f[first + 1]), io::parse_double(f[first + 2])});
  }
  std::vector<LieCoordinates> out;
  for (auto& [id, rows] : groups) {
    int d = 0;
    int m = 0;
    for (const auto& r : rows) {
      if (r.degree == 1) ++d;
      m = std::max(m, r.degree);
    }
    if (d < 1 || m < 1) throw DomainError("Lie CSV: no degree-1 rows");
    auto basis = lie_basis(d, m);
    if (rows.size() != basis->size()) throw DomainError("Lie CSV: row count does not match Lyndon basis");
    std::vector<double> coeffs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].word != basis->word(i).str(d) || rows[i].degree != basis->word(i).degree())
        throw DomainError("Lie CSV: word '" + rows[i].word + "' out of canonical order");
      coeffs[i] = rows[i].coeff;
    }
    out.emplace_back(std::move(basis), std::move(coeffs));
  }
  return out;
}

}  // namespace sigconc
