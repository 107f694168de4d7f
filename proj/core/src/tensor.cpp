#include "sigconc/tensor.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "sigconc/errors.hpp"
#include "sigconc/io.hpp"

namespace sigconc {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_dims(int d, int m) {
  if (d < 1) throw DomainError("alphabet size d must be positive, got " + std::to_string(d));
  if (m < 0) throw DomainError("truncation level m must be non-negative, got " + std::to_string(m));
}

}  // namespace

std::string word_to_string(std::span<const int> word, int d) {
  if (word.empty()) return "()";
  std::string out;
  for (std::size_t j = 0; j < word.size(); ++j) {
    if (d > 9 && j > 0) out += '.';
    out += std::to_string(word[j]);
  }
  return out;
}

Word parse_word(std::string_view text, int d) {
  text = io::trim(text);
  Word word;
  if (text == "()" || text.empty()) return word;
  if (d > 9) {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto dot = text.find('.', start);
      auto piece = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
      word.push_back(static_cast<int>(io::parse_int(piece)));
      if (dot == std::string_view::npos) break;
      start = dot + 1;
    }
  } else {
    for (char c : text) {
      if (c < '0' || c > '9') throw DomainError("malformed word '" + std::string(text) + "'");
      word.push_back(c - '0');
    }
  }
  for (int letter : word)
    if (letter < 1 || letter > d)
      throw DomainError("letter " + std::to_string(letter) + " outside alphabet {1.." + std::to_string(d) + "}");
  return word;
}

std::size_t tensor_size(int d, int m) {
  check_dims(d, m);
  return level_offset(d, m + 1);
}

std::size_t level_offset(int d, int k) {
  std::size_t offset = 0;
  std::size_t p = 1;
  for (int l = 0; l < k; ++l) {
    offset += p;
    p *= static_cast<std::size_t>(d);
  }
  return offset;
}

std::size_t word_index(std::span<const int> word, int d) {
  if (d < 1) throw DomainError("alphabet size d must be positive");
  std::size_t within = 0;
  for (int letter : word) {
    if (letter < 1 || letter > d)
      throw DomainError("letter " + std::to_string(letter) + " outside alphabet {1.." + std::to_string(d) + "}");
    within = within * static_cast<std::size_t>(d) + static_cast<std::size_t>(letter - 1);
  }
  return level_offset(d, static_cast<int>(word.size())) + within;
}

Word word_at(std::size_t index, int d) {
  if (d < 1) throw DomainError("alphabet size d must be positive");
  int k = 0;
  std::size_t p = 1;
  while (index >= p) {
    index -= p;
    p *= static_cast<std::size_t>(d);
    ++k;
  }
  Word word(static_cast<std::size_t>(k));
  for (int j = k - 1; j >= 0; --j) {
    word[static_cast<std::size_t>(j)] = static_cast<int>(index % static_cast<std::size_t>(d)) + 1;
    index /= static_cast<std::size_t>(d);
  }
  return word;
}

TruncatedTensor::TruncatedTensor(int d, int m) : d_(d), m_(m), coords_(tensor_size(d, m), 0.0) {}

TruncatedTensor::TruncatedTensor(int d, int m, std::vector<double> coords)
    : d_(d), m_(m), coords_(std::move(coords)) {
  if (coords_.size() != tensor_size(d, m))
    throw DomainError("coordinate array has length " + std::to_string(coords_.size()) + ", expected " +
                      std::to_string(tensor_size(d, m)));
  ensure_finite("tensor construction");
}

TruncatedTensor TruncatedTensor::unit(int d, int m) {
  TruncatedTensor t(d, m);
  t.coords_[0] = 1.0;
  return t;
}

TruncatedTensor TruncatedTensor::from_vector(std::span<const double> x, int m) {
  TruncatedTensor t(static_cast<int>(x.size()), m);
  if (m >= 1) std::copy(x.begin(), x.end(), t.level(1).begin());
  return t;
}

TruncatedTensor TruncatedTensor::basis(const Word& word, int d, int m) {
  TruncatedTensor t(d, m);
  t[word] = 1.0;
  return t;
}

std::span<const double> TruncatedTensor::level(int k) const {
  if (k < 0 || k > m_) throw DomainError("level " + std::to_string(k) + " outside 0.." + std::to_string(m_));
  return std::span<const double>(coords_).subspan(level_offset(d_, k), ipow(static_cast<std::size_t>(d_), k));
}

std::span<double> TruncatedTensor::level(int k) {
  if (k < 0 || k > m_) throw DomainError("level " + std::to_string(k) + " outside 0.." + std::to_string(m_));
  return std::span<double>(coords_).subspan(level_offset(d_, k), ipow(static_cast<std::size_t>(d_), k));
}

double TruncatedTensor::operator[](const Word& word) const {
  if (static_cast<int>(word.size()) > m_) throw DomainError("word longer than truncation level");
  return coords_[word_index(word, d_)];
}

double& TruncatedTensor::operator[](const Word& word) {
  if (static_cast<int>(word.size()) > m_) throw DomainError("word longer than truncation level");
  return coords_[word_index(word, d_)];
}

void TruncatedTensor::check_shape(const TruncatedTensor& other) const {
  if (!same_shape(other))
    throw DomainError("tensor shape mismatch: (d=" + std::to_string(d_) + ", m=" + std::to_string(m_) +
                      ") vs (d=" + std::to_string(other.d_) + ", m=" + std::to_string(other.m_) + ")");
}

TruncatedTensor& TruncatedTensor::operator+=(const TruncatedTensor& rhs) {
  check_shape(rhs);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += rhs.coords_[i];
  return *this;
}

TruncatedTensor& TruncatedTensor::operator-=(const TruncatedTensor& rhs) {
  check_shape(rhs);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= rhs.coords_[i];
  return *this;
}

TruncatedTensor& TruncatedTensor::operator*=(double s) {
  for (double& c : coords_) c *= s;
  return *this;
}

void TruncatedTensor::ensure_finite(std::string_view context) const {
  for (double c : coords_)
    if (!std::isfinite(c)) throw NumericError("non-finite tensor coordinate in " + std::string(context));
}

TruncatedTensor tensor_product(const TruncatedTensor& a, const TruncatedTensor& b) {
  if (!a.same_shape(b)) throw DomainError("tensor_product: shape mismatch");
  const int d = a.dim();
  const int m = a.depth();
  TruncatedTensor out(d, m);
  for (int k = 0; k <= m; ++k) {
    auto dst = out.level(k);
    for (int i = 0; i <= k; ++i) {
      auto left = a.level(i);
      auto right = b.level(k - i);
      const std::size_t nr = right.size();
      for (std::size_t u = 0; u < left.size(); ++u) {
        const double lu = left[u];
        if (lu == 0.0) continue;
        double* row = dst.data() + u * nr;
        for (std::size_t v = 0; v < nr; ++v) row[v] += lu * right[v];
      }
    }
  }
  out.ensure_finite("tensor_product");
  return out;
}

TruncatedTensor tensor_exp(const TruncatedTensor& a) {
  if (a.coords()[0] != 0.0) throw DomainError("tensor_exp: scalar part must be 0");
  TruncatedTensor result = TruncatedTensor::unit(a.dim(), a.depth());
  TruncatedTensor term = result;
  for (int n = 1; n <= a.depth(); ++n) {
    term = tensor_product(term, a);
    term *= 1.0 / n;
    result += term;
  }
  result.ensure_finite("tensor_exp");
  return result;
}

TruncatedTensor tensor_log(const TruncatedTensor& g) {
  if (g.coords()[0] != 1.0) throw DomainError("tensor_log: scalar part must be 1");
  TruncatedTensor x = g;
  x.coords()[0] = 0.0;
  TruncatedTensor result(g.dim(), g.depth());
  TruncatedTensor power = x;
  for (int j = 1; j <= g.depth(); ++j) {
    const double c = (j % 2 == 1 ? 1.0 : -1.0) / j;
    for (std::size_t i = 0; i < result.size(); ++i) result.coords()[i] += c * power.coords()[i];
    if (j < g.depth()) power = tensor_product(power, x);
  }
  result.ensure_finite("tensor_log");
  return result;
}

void multiply_by_segment_exp(TruncatedTensor& acc, std::span<const double> dx) {
  const int d = acc.dim();
  const int m = acc.depth();
  if (static_cast<int>(dx.size()) != d) throw DomainError("segment increment has wrong dimension");
  const std::size_t top = ipow(static_cast<std::size_t>(d), m);
  thread_local std::vector<double> cur, next;
  cur.resize(top);
  next.resize(top);
  // Top level first so lower levels are still the old values when read.
  for (int k = m; k >= 1; --k) {
    const double a0 = acc.coords()[0];
    for (int c = 0; c < d; ++c) cur[static_cast<std::size_t>(c)] = a0 * dx[static_cast<std::size_t>(c)] / k;
    std::size_t len = static_cast<std::size_t>(d);
    for (int j = 1; j < k; ++j) {
      auto lvl = acc.level(j);
      const double scale = 1.0 / (k - j);
      for (std::size_t u = 0; u < len; ++u) {
        const double v = (cur[u] + lvl[u]) * scale;
        double* row = next.data() + u * static_cast<std::size_t>(d);
        for (int c = 0; c < d; ++c) row[c] = v * dx[static_cast<std::size_t>(c)];
      }
      len *= static_cast<std::size_t>(d);
      std::swap(cur, next);
    }
    auto lvl = acc.level(k);
    for (std::size_t u = 0; u < len; ++u) lvl[u] += cur[u];
  }
}

double level_norm(const TruncatedTensor& a, int k) {
  double s = 0.0;
  for (double c : a.level(k)) s += c * c;
  return std::sqrt(s);
}

std::vector<double> level_weights(const WeightScheme& scheme, int m) {
  std::vector<double> w(static_cast<std::size_t>(m) + 1, 1.0);
  double factorial = 1.0;
  for (int k = 0; k <= m; ++k) {
    if (k > 0) factorial *= k;
    w[static_cast<std::size_t>(k)] = std::visit(
        [&](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UnitWeights>) {
            return 1.0;
          } else if constexpr (std::is_same_v<S, FactorialWeights>) {
            return 1.0 / factorial;
          } else if constexpr (std::is_same_v<S, GeometricFactorialWeights>) {
            if (!(s.beta > 0.0)) throw DomainError("weight parameter beta must be positive");
            return std::pow(s.beta, k) / factorial;
          } else {
            if (!(s.scale > 0.0)) throw DomainError("weight scale sigma must be positive");
            return 1.0 / (factorial * std::pow(s.scale, 0.5 * k));
          }
        },
        scheme);
  }
  return w;
}

std::string scheme_name(const WeightScheme& scheme) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UnitWeights>) return "unit";
        else if constexpr (std::is_same_v<S, FactorialWeights>) return "factorial";
        else if constexpr (std::is_same_v<S, GeometricFactorialWeights>) return "geometric_factorial";
        else return "optimal";
      },
      scheme);
}

double weighted_norm(const TruncatedTensor& a, std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != a.depth() + 1) throw DomainError("weight vector length must be m+1");
  double best = 0.0;
  for (int k = 0; k <= a.depth(); ++k) best = std::max(best, weights[static_cast<std::size_t>(k)] * level_norm(a, k));
  return best;
}

double weighted_norm(const TruncatedTensor& a, const WeightScheme& scheme) {
  return weighted_norm(a, level_weights(scheme, a.depth()));
}

void write_tensor_csv(std::ostream& out, std::span<const TruncatedTensor> tensors) {
  if (tensors.empty()) throw DomainError("write_tensor_csv: no tensors");
  const int d = tensors.front().dim();
  const int m = tensors.front().depth();
  const bool with_id = tensors.size() > 1;
  if (with_id) out << "path_id,";
  out << "d,m";
  for (std::size_t i = 0; i < tensors.front().size(); ++i) out << ',' << word_to_string(word_at(i, d), d);
  out << '\n';
  for (std::size_t row = 0; row < tensors.size(); ++row) {
    const auto& t = tensors[row];
    if (t.dim() != d || t.depth() != m) throw DomainError("write_tensor_csv: mixed shapes");
    if (with_id) out << row << ',';
    out << d << ',' << m;
    for (double c : t.coords()) out << ',' << io::format_double(c);
    out << '\n';
  }
}

std::vector<TruncatedTensor> read_tensor_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DomainError("tensor CSV: missing header");
  auto cols = io::split_csv_line(header);
  std::size_t first = 0;
  if (!cols.empty() && cols[0] == "path_id") first = 1;
  if (cols.size() < first + 3 || cols[first] != "d" || cols[first + 1] != "m")
    throw DomainError("tensor CSV: header must start with [path_id,]d,m");
  std::vector<TruncatedTensor> out;
  std::string line;
  while (std::getline(in, line)) {
    if (io::trim(line).empty()) continue;
    auto fields = io::split_csv_line(line);
    if (fields.size() != cols.size()) throw DomainError("tensor CSV: row has wrong number of fields");
    const int d = static_cast<int>(io::parse_int(fields[first]));
    const int m = static_cast<int>(io::parse_int(fields[first + 1]));
    if (tensor_size(d, m) != cols.size() - first - 2) throw DomainError("tensor CSV: column count does not match d,m");
    std::vector<double> coords;
    coords.reserve(cols.size() - first - 2);
    for (std::size_t i = first + 2; i < fields.size(); ++i) {
      if (cols[i] != word_to_string(word_at(i - first - 2, d), d))
        throw DomainError("tensor CSV: unexpected column '" + std::string(cols[i]) + "'");
      coords.push_back(io::parse_double(fields[i]));
    }
    out.emplace_back(d, m, std::move(coords));
  }
  return out;
}

}  // namespace sigconc
