#pragma once

// Monte Carlo experiments on signature features of Gaussian paths: moments,
// tail curves and exponent fits, moment ratios, small-ball probabilities,
// mean concentration in weighted norms, and BCH Lipschitz growth.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sigconc/gaussian.hpp"
#include "sigconc/stats.hpp"
#include "sigconc/tensor.hpp"

namespace sigconc {

/// (S_ij - S_ji) / 2 from the level-2 signature. Requires i != j.
double levy_area(const Path& p, int i, int j);

struct CoordinateFeature {
  Word word;
};
struct AreaFeature {
  int i;
  int j;
};
/// Scalar functional of a path's signature.
using Feature = std::variant<CoordinateFeature, AreaFeature>;

/// Tensor level (chaos order) of the feature.
int feature_level(const Feature& f);
std::string feature_label(const Feature& f, int d);
/// Throws DomainError if the feature does not fit alphabet size d.
void validate_feature(const Feature& f, int d);
double evaluate_feature(const Feature& f, const TruncatedTensor& signature);

/// Feature values of paths [first_index, first_index + count) drawn by `sampler`.
/// Element i depends only on (seed, first_index + i).
std::vector<double> sample_feature(const PathSampler& sampler, const Feature& f, std::size_t count, SeedSpec seed,
                                   unsigned threads = 1, std::uint64_t first_index = 0);

struct Reference {
  double value;
  std::string provenance;
};

struct VarianceReport {
  std::string feature;
  stats::Estimate second_moment;
  stats::Estimate fourth_moment;
  std::optional<Reference> reference;
  int n_steps = 0;
  double horizon = 0.0;
  std::size_t sample_count = 0;
};

/// Analytic E[F^2] where one is known: level-1 coordinates (R(T,T)),
/// Brownian words with distinct letters (T^k/k!) and Brownian areas (T^2/4).
std::optional<Reference> analytic_second_moment(const GaussianModel& model, const Feature& f, double horizon);

VarianceReport estimate_coordinate_moments(const GaussianModel& model, const Feature& f, const SampleGrid& grid,
                                           std::size_t count, SeedSpec seed, unsigned threads = 1);

/// Second moment extrapolated to zero mesh from two grids (Richardson, error linear in the step).
struct ExtrapolatedMoment {
  stats::Estimate coarse;
  stats::Estimate fine;
  stats::Estimate extrapolated;
  int coarse_steps = 0;
  int fine_steps = 0;
};

ExtrapolatedMoment richardson_second_moment(const GaussianModel& model, const Feature& f, double horizon,
                                            int coarse_steps, int fine_steps, std::size_t count, SeedSpec seed,
                                            unsigned threads = 1);

/// E[A^2] for the OU Lévy area at horizon 1 from the commonly quoted closed form. Disagrees with ou_area_isometry.
double ou_area_quoted_formula(double theta);
/// E[A^2] for the OU Lévy area from the Itô isometry, E[A^2] = (1/2) int_0^T Var(X_t) dt.
double ou_area_isometry(double theta, double horizon, OuStart start);

/// Ratio of second moments over two horizons with the same step count.
struct ScalingReport {
  stats::Estimate moment_short;
  stats::Estimate moment_long;
  double ratio = 0.0;
  double ratio_se = 0.0;
  std::optional<double> expected;
};

ScalingReport horizon_scaling(const GaussianModel& model, const Feature& f, int n_steps, double short_horizon,
                              double long_horizon, std::size_t count, SeedSpec seed, unsigned threads = 1);

/// Empirical survival P(|F| >= t).
struct TailCurve {
  std::vector<double> thresholds;
  std::vector<double> survival;
  std::vector<double> std_err;
  std::size_t sample_count = 0;
};

/// Thresholds at empirical quantiles of |F|; tail masses 1-lo .. 1-hi are log-spaced.
struct QuantileGrid {
  double lo = 0.5;
  double hi = 0.9999;
  int points = 40;
};

inline constexpr std::size_t kMinTailSamples = 1000;

TailCurve empirical_tail(std::span<const double> samples, const QuantileGrid& grid = {});
TailCurve empirical_tail(std::span<const double> samples, std::span<const double> thresholds);

struct ExponentFit {
  double alpha_hat = 0.0;
  double c_hat = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;
  double r_squared = 0.0;
  std::size_t points_used = 0;
};

/// OLS of log(-log S(t)) on log t over curve points whose quantile level
/// 1 - S(t) lies in [q_lo, q_hi]. Slope is alpha_hat, exp(intercept) is c_hat.
ExponentFit fit_tail_exponent(const TailCurve& curve, double q_lo = 0.99, double q_hi = 0.9999);

/// Diagnostic: exponent of -log S(t) = c t^alpha - log C with the prefactor C
/// left free, by profiling alpha over [0.1, 4]. Unbiased where the prefactor
/// matters but much noisier than fit_tail_exponent.
double prefactor_free_exponent(const TailCurve& curve, double q_lo = 0.99, double q_hi = 0.9999);

struct HypercontractivityReport {
  int level = 0;
  double ratio = 0.0;     // ||F||_4 / ||F||_2
  double ratio_se = 0.0;  // bootstrap
  double bound = 0.0;     // 3^{k/2}
  bool pass = false;
};

HypercontractivityReport hypercontractivity_ratio(std::span<const double> samples, int k,
                                                  std::size_t resamples = 200,
                                                  std::uint64_t bootstrap_seed = 0x5eed'b007ULL);

struct SmallBallPoint {
  double epsilon;
  double probability;
  double std_err;
  double bound;
};

struct SmallBallReport {
  int level = 0;
  double sigma_hat = 0.0;
  std::vector<SmallBallPoint> points;
  bool pass = false;
};

/// P(|F| <= eps * sigma_hat) against C_k eps^{1/k} with C_k = 2k.
SmallBallReport small_ball_curve(std::span<const double> samples, std::span<const double> epsilons, int k);

/// w_k = 1 / (k! scale^{k/2}), k = 0..m.
std::vector<double> optimal_weights(int m, double scale);

enum class FeatureKind { Signature, LogSignature };

struct MeanConcentrationConfig {
  GaussianModel model;
  SampleGrid grid;
  int m = 3;
  WeightScheme weights = FactorialWeights{};
  FeatureKind feature = FeatureKind::Signature;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 20;
  std::size_t reference_count = 0;
  SeedSpec seed;
  unsigned threads = 1;
};

struct MeanDeviationCurve {
  std::vector<std::size_t> n_values;
  std::vector<double> deviations;     // mean over reps of ||mu_n - mu_ref||_w
  std::vector<double> deviation_se;   // standard error of that mean
  double slope_hat = 0.0;
  double slope_r_squared = 0.0;
  double reference_error = 0.0;       // weighted norm of the reference's coordinate standard errors
  std::size_t feature_dim = 0;        // dim T^(m)(R^d)
  WeightScheme weights;
  FeatureKind feature = FeatureKind::Signature;
};

/// Reference mean from paths [0, reference_count); each (n, rep) draw uses
/// fresh path indices after that, so the reference is independent.
MeanDeviationCurve mean_concentration_experiment(const MeanConcentrationConfig& config);

struct BchProbeConfig {
  int d = 2;
  int m = 3;
  std::vector<double> radii;
  std::size_t pairs = 500;
  SeedSpec seed;
  WeightScheme weights = FactorialWeights{};
  std::size_t max_attempts_per_pair = 1000;
};

struct BchRadiusResult {
  double radius = 0.0;
  double max_ratio = 0.0;
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;
  std::size_t attempts = 0;
};

struct BchProbeResult {
  std::vector<BchRadiusResult> radii;
  double growth_slope = 0.0;  // slope of log(max ratio) against log(1+R)
  double slope_bound = 0.0;   // m - 1 + 0.5
  bool pass = false;
};

/// ||Log x - Log y||_w / ||x - y||_w, or nothing when x == y.
std::optional<double> bch_secant_ratio(const TruncatedTensor& x, const TruncatedTensor& y,
                                       std::span<const double> weights);

/// Secant ratios ||Log x - Log y||_w / ||x - y||_w over random group-like
/// x = exp(a), y = exp(b) in the ball ||.||_w <= R. Every level of a Lie
/// candidate gets an independent uniform weighted size below R; odd pairs
/// take b = a + (candidate of size 1e-3 R) to probe the local constant.
/// Rejection is capped per draw at max_attempts_per_pair (SamplingError).
BchProbeResult bch_lipschitz_probe(const BchProbeConfig& config);

}  // namespace sigconc
