#pragma once

// Config-driven experiment runner behind the `sigconc` CLI. run() never
// touches the filesystem for outputs; it returns file contents keyed by
// name so callers (CLI, tests) decide where they go.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sigconc/lab.hpp"

namespace sigconc::harness {

inline constexpr int kSchemaVersion = 1;

enum class Experiment { Simulate, Sig, Logsig, Tail, Variance, Scaling, Meanconc, Bchprobe, Smallball, Hyper, Plot };

std::string experiment_name(Experiment e);
/// Throws ConfigError for unknown names.
Experiment parse_experiment(const std::string& name);

/// Malformed or out-of-domain configuration. Maps to exit status 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Layout { Stacked, PerPath };

struct ExperimentConfig {
  Experiment experiment = Experiment::Simulate;
  std::optional<GaussianModel> model;
  SampleGrid grid{512, 1.0};
  int m = 2;
  std::optional<Feature> feature;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  // simulate
  Layout layout = Layout::Stacked;
  // sig, logsig, plot (relative paths resolve against base_dir)
  std::vector<std::string> inputs;
  std::filesystem::path base_dir;

  // tail
  double q_lo = 0.99;
  double q_hi = 0.9999;
  QuantileGrid tail_grid;
  std::optional<std::pair<double, double>> alpha_range;
  double min_r_squared = 0.95;
  bool svg = false;
  std::vector<int> reference_k;

  // variance, scaling
  std::optional<std::pair<int, int>> refine_grids;
  double se_multiple = 3.0;
  double rel_tol = 0.05;
  std::pair<double, double> horizons{1.0, 2.0};

  // meanconc
  WeightScheme weights = FactorialWeights{};
  FeatureKind feature_kind = FeatureKind::Signature;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 20;
  std::size_t reference_samples = 0;
  std::pair<double, double> slope_range{-0.65, -0.35};

  // bchprobe
  int d = 2;
  std::vector<double> radii;
  std::size_t pairs = 500;
  std::size_t max_attempts = 1000;

  // smallball, hyper
  std::vector<double> epsilons{0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
  std::size_t resamples = 200;
};

/// Parses a JSON config for `experiment`. Unknown keys, wrong types and
/// out-of-domain values throw ConfigError naming the field.
ExperimentConfig parse_config(const std::string& json_text, Experiment experiment,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& file, Experiment experiment);

struct RunResult {
  int status = 0;  // 0 ok, 1 validation, 2 numeric/sampling, 3 invariant check failed
  std::string message;
  std::map<std::string, std::string> files;
};

struct RunOptions {
  unsigned threads = 1;
};

/// Never throws for configuration or numeric problems; they become statuses.
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes every file of `result` under `dir`, creating it if needed.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

struct PlotCurve {
  std::string label;
  std::vector<double> t;
  std::vector<double> survival;
};

/// Log-linear SVG of survival against t with reference curves exp(-t^{2/k}).
/// Coordinate mapping: t in [0, t_max] to x in [70, 610]; log10 survival in
/// [-6, 0] to y in [430, 30]. t_max is the largest curve abscissa rounded up
/// to an integer, or 6 for a reference-only plot. Points below 1e-6 are dropped.
/// Throws DomainError when there is nothing to draw.
std::string emit_plot(std::span<const PlotCurve> curves, std::span<const int> reference_k);

/// Reads a tail CSV (threshold,scaled_threshold,survival,std_err) as a curve in scaled units.
PlotCurve read_tail_csv(std::istream& in, std::string label);

}  // namespace sigconc::harness
