#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "sigconc/lie.hpp"
#include "sigconc/tensor.hpp"

namespace sigconc {

/// Piecewise-linear path: strictly increasing knot times and an (L+1) x d
/// value matrix stored row-major.
class Path {
 public:
  /// Validates: at least two knots, strictly increasing times, finite values,
  /// values.size() == times.size() * d.
  Path(std::vector<double> times, std::vector<double> values, int d);

  int dim() const { return d_; }
  std::size_t num_points() const { return times_.size(); }
  std::size_t num_segments() const { return times_.size() - 1; }

  std::span<const double> times() const { return times_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> point(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_));
  }

  bool operator==(const Path&) const = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  int d_;
};

/// Same trace traversed backwards, on the mirrored time grid.
Path reversed(const Path& p);

/// Signature of the path whose consecutive increments are the rows of
/// `increments` (row-major, d columns).
TruncatedTensor signature_of_increments(std::span<const double> increments, int d, int m);

TruncatedTensor path_signature(const Path& p, int m);

LieCoordinates path_log_signature(const Path& p, int m);

/// Signature over [s, t] with values linearly interpolated at the endpoints.
TruncatedTensor signature_on_interval(const Path& p, double s, double t, int m);

/// All order-preserving interleavings of u and v, with multiplicities.
std::map<Word, int> shuffle_product(const Word& u, const Word& v);

/// Path CSV. A single path has header `t,x1,...,xd`; several paths are
/// stacked with a leading `path_id` column. Times must increase strictly
/// within each path.
std::vector<Path> read_path_csv(std::istream& in);
void write_path_csv(std::ostream& out, std::span<const Path> paths);

}  // namespace sigconc
