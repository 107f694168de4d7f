#include "sigconc/signature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <string>

#include "sigconc/errors.hpp"
#include "sigconc/io.hpp"

namespace sigconc {

Path::Path(std::vector<double> times, std::vector<double> values, int d)
    : times_(std::move(times)), values_(std::move(values)), d_(d) {
  if (d_ < 1) throw DomainError("path dimension must be positive");
  if (times_.size() < 2) throw DomainError("path needs at least two points");
  if (values_.size() != times_.size() * static_cast<std::size_t>(d_))
    throw DomainError("path value matrix does not match times and dimension");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) throw DomainError("non-finite path time");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw DomainError("path times must be strictly increasing (row " + std::to_string(i) + ")");
  }
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("non-finite path value");
}

Path reversed(const Path& p) {
  const std::size_t n = p.num_points();
  const auto t = p.times();
  std::vector<double> times(n);
  std::vector<double> values;
  values.reserve(p.values().size());
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = t[0] + (t[n - 1] - t[n - 1 - i]);
    auto row = p.point(n - 1 - i);
    values.insert(values.end(), row.begin(), row.end());
  }
  // Mirrored grid can lose strict monotonicity to rounding only if knots are
  // closer than an ulp; fall back to the index grid then.
  for (std::size_t i = 1; i < n; ++i)
    if (!(times[i] > times[i - 1])) {
      for (std::size_t j = 0; j < n; ++j) times[j] = static_cast<double>(j);
      break;
    }
  return Path(std::move(times), std::move(values), p.dim());
}

TruncatedTensor signature_of_increments(std::span<const double> increments, int d, int m) {
  if (d < 1 || increments.size() % static_cast<std::size_t>(d) != 0)
    throw DomainError("increment array does not match dimension");
  TruncatedTensor acc = TruncatedTensor::unit(d, m);
  for (std::size_t i = 0; i < increments.size(); i += static_cast<std::size_t>(d))
    multiply_by_segment_exp(acc, increments.subspan(i, static_cast<std::size_t>(d)));
  acc.ensure_finite("path signature");
  return acc;
}

namespace {

TruncatedTensor signature_of_points(std::span<const double> points, int d, int m) {
  const std::size_t ud = static_cast<std::size_t>(d);
  std::vector<double> dx(ud);
  TruncatedTensor acc = TruncatedTensor::unit(d, m);
  for (std::size_t i = ud; i < points.size(); i += ud) {
    for (std::size_t c = 0; c < ud; ++c) dx[c] = points[i + c] - points[i - ud + c];
    multiply_by_segment_exp(acc, dx);
  }
  acc.ensure_finite("path signature");
  return acc;
}

}  // namespace

TruncatedTensor path_signature(const Path& p, int m) {
  if (m < 1) throw DomainError("signature level m must be at least 1");
  return signature_of_points(p.values(), p.dim(), m);
}

LieCoordinates path_log_signature(const Path& p, int m) {
  return tensor_to_lyndon(tensor_log(path_signature(p, m)));
}

TruncatedTensor signature_on_interval(const Path& p, double s, double t, int m) {
  if (m < 1) throw DomainError("signature level m must be at least 1");
  const auto times = p.times();
  if (!(s < t) || s < times.front() || t > times.back())
    throw DomainError("interval [s,t] must satisfy times[0] <= s < t <= times[end]");
  const std::size_t d = static_cast<std::size_t>(p.dim());

  auto interpolate = [&](double u, std::vector<double>& out) {
    auto it = std::upper_bound(times.begin(), times.end(), u);
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    if (hi >= times.size()) hi = times.size() - 1;
    const std::size_t lo = hi - 1;
    const double w = (u - times[lo]) / (times[hi] - times[lo]);
    auto a = p.point(lo);
    auto b = p.point(hi);
    for (std::size_t c = 0; c < d; ++c) out.push_back(w == 1.0 ? b[c] : a[c] + w * (b[c] - a[c]));
  };

  std::vector<double> points;
  interpolate(s, points);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] > s && times[i] < t) {
      auto row = p.point(i);
      points.insert(points.end(), row.begin(), row.end());
    }
  }
  interpolate(t, points);
  return signature_of_points(points, p.dim(), m);
}

std::map<Word, int> shuffle_product(const Word& u, const Word& v) {
  std::map<Word, int> out;
  Word current;
  current.reserve(u.size() + v.size());
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) {
    if (i == u.size() && j == v.size()) {
      ++out[current];
      return;
    }
    if (i < u.size()) {
      current.push_back(u[i]);
      rec(i + 1, j);
      current.pop_back();
    }
    if (j < v.size()) {
      current.push_back(v[j]);
      rec(i, j + 1);
      current.pop_back();
    }
  };
  rec(0, 0);
  return out;
}

std::vector<Path> read_path_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DomainError("path CSV: missing header");
  auto cols = io::split_csv_line(header);
  const bool stacked = !cols.empty() && cols[0] == "path_id";
  const std::size_t first = stacked ? 1 : 0;
  if (cols.size() < first + 2 || cols[first] != "t")
    throw DomainError("path CSV: header must be [path_id,]t,x1,...,xd");
  const int d = static_cast<int>(cols.size() - first - 1);
  for (int c = 1; c <= d; ++c)
    if (cols[first + static_cast<std::size_t>(c)] != "x" + std::to_string(c))
      throw DomainError("path CSV: expected column x" + std::to_string(c));

  std::vector<Path> paths;
  std::vector<double> times, values;
  long long current_id = -1;
  auto flush = [&]() {
    if (!times.empty()) paths.emplace_back(std::move(times), std::move(values), d);
    times.clear();
    values.clear();
  };
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    auto f = io::split_csv_line(line);
    if (f.size() != cols.size())
      throw DomainError("path CSV: line " + std::to_string(line_no) + " has wrong number of fields");
    if (stacked) {
      const long long id = io::parse_int(f[0]);
      if (id != current_id) {
        if (id < current_id) throw DomainError("path CSV: path_id must be non-decreasing");
        flush();
        current_id = id;
      }
    }
    const double t = io::parse_double(f[first]);
    if (!times.empty() && !(t > times.back()))
      throw DomainError("path CSV: time not strictly increasing at line " + std::to_string(line_no));
    times.push_back(t);
    for (std::size_t c = first + 1; c < f.size(); ++c) values.push_back(io::parse_double(f[c]));
  }
  flush();
  if (paths.empty()) throw DomainError("path CSV: no data rows");
  return paths;
}

void write_path_csv(std::ostream& out, std::span<const Path> paths) {
  if (paths.empty()) throw DomainError("write_path_csv: no paths");
  const int d = paths.front().dim();
  const bool stacked = paths.size() > 1;
  if (stacked) out << "path_id,";
  out << 't';
  for (int c = 1; c <= d; ++c) out << ",x" << c;
  out << '\n';
  for (std::size_t id = 0; id < paths.size(); ++id) {
    const Path& p = paths[id];
    if (p.dim() != d) throw DomainError("write_path_csv: mixed dimensions");
    for (std::size_t i = 0; i < p.num_points(); ++i) {
      if (stacked) out << id << ',';
      out << io::format_double(p.times()[i]);
      for (double v : p.point(i)) out << ',' << io::format_double(v);
      out << '\n';
    }
  }
}

}  // namespace sigconc
