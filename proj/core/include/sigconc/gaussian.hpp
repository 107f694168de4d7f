#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sigconc/signature.hpp"

namespace sigconc {

struct BrownianMotion {};

struct FractionalBrownianMotion {
  double hurst;
};

enum class OuStart { Zero, Stationary };

struct OrnsteinUhlenbeck {
  double theta;
  OuStart start = OuStart::Zero;
};

using ModelKind = std::variant<BrownianMotion, FractionalBrownianMotion, OrnsteinUhlenbeck>;

/// Centred Gaussian process in R^dim with i.i.d. coordinates.
struct GaussianModel {
  ModelKind kind;
  int dim = 1;

  /// Throws DomainError naming the offending parameter.
  void validate() const;
  /// Non-fatal notes, e.g. H <= 1/4 lies outside the rough-path lift range.
  std::vector<std::string> warnings() const;
  /// Covariance variation exponent rho (1 for BM and OU, 1/(2H) for fBm).
  /// Carried as metadata only.
  double rho() const;
  std::string name() const;
};

/// Scalar covariance R(s,t) of one coordinate.
double covariance(const GaussianModel& model, double s, double t);

/// Uniform grid t_i = i * horizon / n_steps, i = 0..n_steps.
struct SampleGrid {
  int n_steps = 1;
  double horizon = 1.0;

  void validate() const;
  double step() const { return horizon / n_steps; }
  double time(int i) const { return horizon * i / n_steps; }
};

struct SeedSpec {
  std::uint64_t master_seed = 0;
};

/// Largest fBm grid accepted (Cholesky is O(n^3)).
inline constexpr int kMaxFbmSteps = 4096;

/// Exact sampler of the model's finite-dimensional law on a grid. Path i
/// draws from RandomStream(master_seed, i), so output is independent of how
/// indices are scheduled across workers.
class PathSampler {
 public:
  PathSampler(GaussianModel model, SampleGrid grid);

  const GaussianModel& model() const { return model_; }
  const SampleGrid& grid() const { return grid_; }

  /// Knot values (n_steps+1 rows, dim columns, row-major) of path `index`.
  void sample_values(SeedSpec seed, std::uint64_t index, std::span<double> out) const;
  Path sample(SeedSpec seed, std::uint64_t index) const;

 private:
  GaussianModel model_;
  SampleGrid grid_;
  // fBm only: lower Cholesky factor of the increment covariance, packed by rows.
  std::vector<double> factor_;
};

std::vector<Path> sample_paths(const GaussianModel& model, const SampleGrid& grid, std::size_t count,
                               SeedSpec seed, unsigned threads = 1);

}  // namespace sigconc
