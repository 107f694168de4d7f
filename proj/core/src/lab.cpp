#include "sigconc/lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sigconc/errors.hpp"
#include "sigconc/lie.hpp"
#include "sigconc/parallel.hpp"
#include "sigconc/rng.hpp"

namespace sigconc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool distinct_letters(const Word& w) {
  Word sorted = w;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

std::vector<double> squares(std::span<const double> xs, int power) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double s = xs[i] * xs[i];
    out[i] = power == 2 ? s : s * s;
  }
  return out;
}

// Signature of the sampled path with index `index`, truncated at level m.
TruncatedTensor sampled_signature(const PathSampler& sampler, SeedSpec seed, std::uint64_t index, int m) {
  const std::size_t d = static_cast<std::size_t>(sampler.model().dim);
  const std::size_t n = static_cast<std::size_t>(sampler.grid().n_steps);
  thread_local std::vector<double> values, increments;
  values.resize((n + 1) * d);
  increments.resize(n * d);
  sampler.sample_values(seed, index, values);
  for (std::size_t i = 0; i < n * d; ++i) increments[i] = values[i + d] - values[i];
  return signature_of_increments(increments, static_cast<int>(d), m);
}

}  // namespace

double levy_area(const Path& p, int i, int j) {
  if (i == j) throw DomainError("levy_area: indices must differ");
  if (i < 1 || j < 1 || i > p.dim() || j > p.dim()) throw DomainError("levy_area: index outside 1..d");
  const TruncatedTensor s = path_signature(p, 2);
  return 0.5 * (s[Word{i, j}] - s[Word{j, i}]);
}

int feature_level(const Feature& f) {
  return std::visit(overloaded{[](const CoordinateFeature& c) { return static_cast<int>(c.word.size()); },
                               [](const AreaFeature&) { return 2; }},
                    f);
}

std::string feature_label(const Feature& f, int d) {
  return std::visit(overloaded{[d](const CoordinateFeature& c) { return "S" + word_to_string(c.word, d); },
                               [](const AreaFeature& a) {
                                 return "A" + std::to_string(a.i) + "," + std::to_string(a.j);
                               }},
                    f);
}

void validate_feature(const Feature& f, int d) {
  std::visit(overloaded{[d](const CoordinateFeature& c) {
                          if (c.word.empty()) throw DomainError("feature.word must be non-empty");
                          for (int l : c.word)
                            if (l < 1 || l > d) throw DomainError("feature.word letter outside 1..d");
                        },
                        [d](const AreaFeature& a) {
                          if (a.i == a.j) throw DomainError("feature.area indices must differ");
                          if (a.i < 1 || a.j < 1 || a.i > d || a.j > d)
                            throw DomainError("feature.area index outside 1..d");
                        }},
             f);
}

double evaluate_feature(const Feature& f, const TruncatedTensor& signature) {
  return std::visit(overloaded{[&](const CoordinateFeature& c) { return signature[c.word]; },
                               [&](const AreaFeature& a) {
                                 return 0.5 * (signature[Word{a.i, a.j}] - signature[Word{a.j, a.i}]);
                               }},
                    f);
}

std::vector<double> sample_feature(const PathSampler& sampler, const Feature& f, std::size_t count, SeedSpec seed,
                                   unsigned threads, std::uint64_t first_index) {
  validate_feature(f, sampler.model().dim);
  const int level = feature_level(f);
  std::vector<double> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    out[i] = evaluate_feature(f, sampled_signature(sampler, seed, first_index + i, level));
  });
  return out;
}

std::optional<Reference> analytic_second_moment(const GaussianModel& model, const Feature& f, double horizon) {
  const bool brownian = std::holds_alternative<BrownianMotion>(model.kind);
  if (const auto* c = std::get_if<CoordinateFeature>(&f)) {
    if (c->word.size() == 1) return Reference{covariance(model, horizon, horizon), "R(T,T)"};
    if (brownian && distinct_letters(c->word)) {
      const int k = static_cast<int>(c->word.size());
      return Reference{std::pow(horizon, k) / std::tgamma(k + 1.0), "Brownian T^k/k! (distinct letters)"};
    }
    return std::nullopt;
  }
  if (brownian) return Reference{horizon * horizon / 4.0, "Brownian Levy area (T/2)^2"};
  return std::nullopt;
}

VarianceReport estimate_coordinate_moments(const GaussianModel& model, const Feature& f, const SampleGrid& grid,
                                           std::size_t count, SeedSpec seed, unsigned threads) {
  if (count < 100) throw DomainError("samples must be >= 100");
  const PathSampler sampler(model, grid);
  const auto xs = sample_feature(sampler, f, count, seed, threads);
  VarianceReport r;
  r.feature = feature_label(f, model.dim);
  r.second_moment = stats::mean_with_se(squares(xs, 2));
  r.fourth_moment = stats::mean_with_se(squares(xs, 4));
  r.reference = analytic_second_moment(model, f, grid.horizon);
  r.n_steps = grid.n_steps;
  r.horizon = grid.horizon;
  r.sample_count = count;
  return r;
}

ExtrapolatedMoment richardson_second_moment(const GaussianModel& model, const Feature& f, double horizon,
                                            int coarse_steps, int fine_steps, std::size_t count, SeedSpec seed,
                                            unsigned threads) {
  if (!(fine_steps > coarse_steps)) throw DomainError("refine grids must be increasing");
  if (count < 100) throw DomainError("samples must be >= 100");
  const PathSampler coarse(model, SampleGrid{coarse_steps, horizon});
  const PathSampler fine(model, SampleGrid{fine_steps, horizon});
  ExtrapolatedMoment out;
  out.coarse_steps = coarse_steps;
  out.fine_steps = fine_steps;
  out.coarse = stats::mean_with_se(squares(sample_feature(coarse, f, count, seed, threads, 0), 2));
  out.fine = stats::mean_with_se(squares(sample_feature(fine, f, count, seed, threads, count), 2));
  const double r = static_cast<double>(fine_steps) / coarse_steps;
  const double a = r / (r - 1.0);
  const double b = 1.0 / (r - 1.0);
  out.extrapolated.value = a * out.fine.value - b * out.coarse.value;
  out.extrapolated.std_err = std::hypot(a * out.fine.std_err, b * out.coarse.std_err);
  return out;
}

double ou_area_quoted_formula(double theta) {
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  const double e1 = 1.0 - std::exp(-theta);
  return (1.0 - std::exp(-2.0 * theta)) / (2.0 * theta * theta) - e1 * e1 / theta;
}

double ou_area_isometry(double theta, double horizon, OuStart start) {
  if (!(theta > 0.0) || !(horizon > 0.0)) throw DomainError("theta and horizon must be positive");
  // Var(X_t) = (1 - e^{-2 theta t}) / (2 theta) from zero, 1 / (2 theta) when stationary.
  if (start == OuStart::Stationary) return horizon / (4.0 * theta);
  return horizon / (4.0 * theta) + std::expm1(-2.0 * theta * horizon) / (8.0 * theta * theta);
}

ScalingReport horizon_scaling(const GaussianModel& model, const Feature& f, int n_steps, double short_horizon,
                              double long_horizon, std::size_t count, SeedSpec seed, unsigned threads) {
  if (!(long_horizon > short_horizon)) throw DomainError("scaling horizons must be increasing");
  if (count < 100) throw DomainError("samples must be >= 100");
  const PathSampler a(model, SampleGrid{n_steps, short_horizon});
  const PathSampler b(model, SampleGrid{n_steps, long_horizon});
  ScalingReport r;
  r.moment_short = stats::mean_with_se(squares(sample_feature(a, f, count, seed, threads, 0), 2));
  r.moment_long = stats::mean_with_se(squares(sample_feature(b, f, count, seed, threads, count), 2));
  if (!(r.moment_short.value > 0.0)) throw NumericError("short-horizon second moment is zero");
  r.ratio = r.moment_long.value / r.moment_short.value;
  r.ratio_se = r.ratio * std::hypot(r.moment_long.std_err / r.moment_long.value,
                                    r.moment_short.std_err / r.moment_short.value);
  const int k = feature_level(f);
  const double span = long_horizon / short_horizon;
  if (std::holds_alternative<BrownianMotion>(model.kind)) r.expected = std::pow(span, k);
  if (const auto* fb = std::get_if<FractionalBrownianMotion>(&model.kind))
    r.expected = std::pow(span, 2.0 * k * fb->hurst);
  return r;
}

TailCurve empirical_tail(std::span<const double> samples, std::span<const double> thresholds) {
  if (samples.size() < kMinTailSamples)
    throw DomainError("empirical_tail needs at least " + std::to_string(kMinTailSamples) + " samples");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (!(thresholds[i] > thresholds[i - 1])) throw DomainError("tail thresholds must be strictly increasing");
  std::vector<double> a(samples.size());
  std::transform(samples.begin(), samples.end(), a.begin(), [](double x) { return std::abs(x); });
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  TailCurve c;
  c.sample_count = a.size();
  for (double t : thresholds) {
    const auto above = a.end() - std::lower_bound(a.begin(), a.end(), t);
    const double s = static_cast<double>(above) / n;
    c.thresholds.push_back(t);
    c.survival.push_back(s);
    c.std_err.push_back(std::sqrt(s * (1.0 - s) / n));
  }
  return c;
}

TailCurve empirical_tail(std::span<const double> samples, const QuantileGrid& grid) {
  if (!(grid.lo > 0.0 && grid.lo < grid.hi && grid.hi < 1.0) || grid.points < 2)
    throw DomainError("quantile grid must satisfy 0 < lo < hi < 1 with at least two points");
  if (samples.size() < kMinTailSamples)
    throw DomainError("empirical_tail needs at least " + std::to_string(kMinTailSamples) + " samples");
  std::vector<double> a(samples.size());
  std::transform(samples.begin(), samples.end(), a.begin(), [](double x) { return std::abs(x); });
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  const double log_hi_mass = std::log(1.0 - grid.lo);
  const double log_lo_mass = std::log(1.0 - grid.hi);
  std::vector<double> thresholds;
  for (int i = 0; i < grid.points; ++i) {
    const double mass = std::exp(log_hi_mass + (log_lo_mass - log_hi_mass) * i / (grid.points - 1));
    const double q = 1.0 - mass;
    auto idx = static_cast<std::ptrdiff_t>(std::ceil(q * n)) - 1;
    idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(a.size()) - 1);
    const double t = a[static_cast<std::size_t>(idx)];
    if (thresholds.empty() || t > thresholds.back()) thresholds.push_back(t);
  }
  return empirical_tail(samples, thresholds);
}

namespace {

struct WindowPoints {
  std::vector<double> t;
  std::vector<double> s;
};

WindowPoints window_points(const TailCurve& curve, double q_lo, double q_hi) {
  if (!(q_lo < q_hi && q_hi < 1.0 && q_lo >= 0.0)) throw DomainError("quantile range must satisfy 0 <= q_lo < q_hi < 1");
  constexpr double slack = 1e-12;
  WindowPoints w;
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    const double s = curve.survival[i];
    const double q = 1.0 - s;
    if (s > 0.0 && s < 1.0 && q >= q_lo - slack && q <= q_hi + slack && curve.thresholds[i] > 0.0) {
      w.t.push_back(curve.thresholds[i]);
      w.s.push_back(s);
    }
  }
  if (w.t.size() < 4)
    throw DomainError("tail fit needs at least 4 curve points inside the quantile range, found " +
                      std::to_string(w.t.size()));
  if (w.t.front() == w.t.back()) throw NumericError("tail fit: degenerate samples (zero spread)");
  return w;
}

}  // namespace

ExponentFit fit_tail_exponent(const TailCurve& curve, double q_lo, double q_hi) {
  const WindowPoints w = window_points(curve, q_lo, q_hi);
  std::vector<double> x(w.t.size()), y(w.t.size());
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    x[i] = std::log(w.t[i]);
    y[i] = std::log(-std::log(w.s[i]));
  }
  const auto fit = stats::ols(x, y);
  return ExponentFit{fit.slope, std::exp(fit.intercept), q_lo, q_hi, fit.r_squared, fit.points};
}

double prefactor_free_exponent(const TailCurve& curve, double q_lo, double q_hi) {
  const WindowPoints w = window_points(curve, q_lo, q_hi);
  std::vector<double> z(w.t.size()), ta(w.t.size());
  for (std::size_t i = 0; i < w.s.size(); ++i) z[i] = -std::log(w.s[i]);
  double best_alpha = 0.0;
  double best_ssr = INFINITY;
  for (int step = 0; step <= 3900; ++step) {
    const double alpha = 0.1 + 0.001 * step;
    for (std::size_t i = 0; i < w.t.size(); ++i) ta[i] = std::pow(w.t[i], alpha);
    const auto fit = stats::ols(ta, z);
    double ssr = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double r = z[i] - fit.intercept - fit.slope * ta[i];
      ssr += r * r;
    }
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

HypercontractivityReport hypercontractivity_ratio(std::span<const double> samples, int k, std::size_t resamples,
                                                  std::uint64_t bootstrap_seed) {
  if (samples.size() < 10000) throw DomainError("hypercontractivity_ratio needs at least 10^4 samples");
  if (k < 1) throw DomainError("chaos level k must be >= 1");
  if (resamples < 2) throw DomainError("bootstrap needs at least two resamples");
  const auto sq = squares(samples, 2);
  const auto quad = squares(samples, 4);
  const double m2 = stats::mean(sq);
  const double m4 = stats::mean(quad);
  if (!(m2 > 0.0)) throw DomainError("hypercontractivity_ratio: zero L2 norm");
  HypercontractivityReport r;
  r.level = k;
  r.ratio = std::pow(m4, 0.25) / std::sqrt(m2);
  r.bound = std::pow(3.0, 0.5 * k);

  const std::size_t n = samples.size();
  std::vector<double> boot(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    RandomStream rng(bootstrap_seed, b);
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = static_cast<std::size_t>(rng.below(n));
      s2 += sq[j];
      s4 += quad[j];
    }
    boot[b] = std::pow(s4 / n, 0.25) / std::sqrt(s2 / n);
  }
  const auto est = stats::mean_with_se(boot);
  r.ratio_se = est.std_err * std::sqrt(static_cast<double>(resamples));
  r.pass = r.ratio <= r.bound * (1.0 + 3.0 * r.ratio_se / r.ratio);
  return r;
}

SmallBallReport small_ball_curve(std::span<const double> samples, std::span<const double> epsilons, int k) {
  if (samples.size() < 10000) throw DomainError("small_ball_curve needs at least 10^4 samples");
  if (k < 1) throw DomainError("chaos level k must be >= 1");
  SmallBallReport r;
  r.level = k;
  r.sigma_hat = std::sqrt(stats::mean(squares(samples, 2)));
  if (!(r.sigma_hat > 0.0)) throw DomainError("small_ball_curve: sigma_hat is zero");
  const double n = static_cast<double>(samples.size());
  r.pass = true;
  for (double eps : epsilons) {
    if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("small-ball epsilon must lie in (0,1]");
    const double radius = eps * r.sigma_hat;
    const auto inside = std::count_if(samples.begin(), samples.end(), [&](double x) { return std::abs(x) <= radius; });
    const double p = static_cast<double>(inside) / n;
    const double bound = 2.0 * k * std::pow(eps, 1.0 / k);
    r.points.push_back({eps, p, std::sqrt(p * (1.0 - p) / n), bound});
    if (!(p <= bound)) r.pass = false;
  }
  return r;
}

std::vector<double> optimal_weights(int m, double scale) {
  if (!(scale > 0.0)) throw DomainError("optimal weight scale sigma must be positive");
  return level_weights(OptimalWeights{scale}, m);
}

MeanDeviationCurve mean_concentration_experiment(const MeanConcentrationConfig& cfg) {
  if (cfg.n_grid.empty()) throw DomainError("n_grid must be non-empty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 1) throw DomainError("n_grid entries must be positive");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw DomainError("n_grid must be strictly increasing");
  }
  if (cfg.reps < 2) throw DomainError("reps must be >= 2");
  if (cfg.m < 1) throw DomainError("m must be >= 1");
  if (cfg.reference_count < 10 * cfg.n_grid.back())
    throw DomainError("reference_samples must be at least 10 * max(n_grid) so the reference is independent and "
                      "more accurate than any draw");
  const auto weights = level_weights(cfg.weights, cfg.m);

  const PathSampler sampler(cfg.model, cfg.grid);
  const int d = cfg.model.dim;
  const std::size_t dim = tensor_size(d, cfg.m);
  std::size_t total = cfg.reference_count;
  for (std::size_t n : cfg.n_grid) total += n * cfg.reps;

  std::vector<double> features(total * dim);
  parallel_for(total, cfg.threads, [&](std::size_t i) {
    TruncatedTensor sig = sampled_signature(sampler, cfg.seed, i, cfg.m);
    if (cfg.feature == FeatureKind::LogSignature) sig = lyndon_to_tensor(tensor_to_lyndon(tensor_log(sig)));
    std::copy(sig.coords().begin(), sig.coords().end(), features.begin() + static_cast<std::ptrdiff_t>(i * dim));
  });

  std::vector<double> column;
  auto block_mean = [&](std::size_t first, std::size_t count, std::vector<double>* se) {
    TruncatedTensor mu(d, cfg.m);
    column.resize(count);
    for (std::size_t c = 0; c < dim; ++c) {
      for (std::size_t r = 0; r < count; ++r) column[r] = features[(first + r) * dim + c];
      if (se) {
        const auto est = stats::mean_with_se(column);
        mu.coords()[c] = est.value;
        (*se)[c] = est.std_err;
      } else {
        mu.coords()[c] = stats::mean(column);
      }
    }
    return mu;
  };

  MeanDeviationCurve out;
  out.weights = cfg.weights;
  out.feature = cfg.feature;
  out.feature_dim = dim;
  std::vector<double> ref_se(dim);
  const TruncatedTensor mu_ref = block_mean(0, cfg.reference_count, &ref_se);
  out.reference_error = weighted_norm(TruncatedTensor(d, cfg.m, ref_se), weights);

  std::size_t offset = cfg.reference_count;
  std::vector<double> log_n, log_dev;
  for (std::size_t n : cfg.n_grid) {
    std::vector<double> devs(cfg.reps);
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const TruncatedTensor mu = block_mean(offset, n, nullptr);
      devs[rep] = weighted_norm(mu - mu_ref, weights);
      offset += n;
    }
    const auto est = stats::mean_with_se(devs);
    if (!(est.value > 0.0)) throw NumericError("mean deviation is zero at n=" + std::to_string(n));
    out.n_values.push_back(n);
    out.deviations.push_back(est.value);
    out.deviation_se.push_back(est.std_err);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_dev.push_back(std::log(est.value));
  }
  if (out.n_values.size() >= 2) {
    const auto fit = stats::ols(log_n, log_dev);
    out.slope_hat = fit.slope;
    out.slope_r_squared = fit.r_squared;
  }
  return out;
}

std::optional<double> bch_secant_ratio(const TruncatedTensor& x, const TruncatedTensor& y,
                                       std::span<const double> weights) {
  const double den = weighted_norm(x - y, weights);
  if (!(den > 0.0)) return std::nullopt;
  return weighted_norm(tensor_log(x) - tensor_log(y), weights) / den;
}

BchProbeResult bch_lipschitz_probe(const BchProbeConfig& cfg) {
  if (cfg.d < 1 || cfg.m < 1) throw DomainError("bchprobe needs d >= 1 and m >= 1");
  if (cfg.radii.empty()) throw DomainError("radii must be non-empty");
  for (std::size_t i = 0; i < cfg.radii.size(); ++i) {
    if (!(cfg.radii[i] > 0.0)) throw DomainError("radii must be positive");
    if (i > 0 && !(cfg.radii[i] > cfg.radii[i - 1])) throw DomainError("radii must be increasing");
  }
  if (cfg.pairs < 100) throw DomainError("pairs per radius must be >= 100");
  const auto weights = level_weights(cfg.weights, cfg.m);
  const auto basis = lie_basis(cfg.d, cfg.m);

  BchProbeResult out;
  out.slope_bound = cfg.m - 1 + 0.5;
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    const double radius = cfg.radii[ri];
    RandomStream rng(cfg.seed.master_seed, ri);
    BchRadiusResult res;
    res.radius = radius;

    // Each degree block gets its own random weighted size in (0, radius), so
    // higher levels are not swamped by level 1.
    auto candidate = [&](double scale) {
      std::vector<double> coeffs(basis->size());
      for (auto& c : coeffs) c = rng.normal();
      TruncatedTensor a = lyndon_to_tensor(LieCoordinates(basis, std::move(coeffs)));
      for (int k = 1; k <= cfg.m; ++k) {
        auto block = a.level(k);
        const double norm = weights[static_cast<std::size_t>(k)] * level_norm(a, k);
        if (!(norm > 0.0)) continue;
        const double target = scale * rng.uniform();
        for (double& v : block) v *= target / norm;
      }
      return a;
    };
    auto accept = [&](auto&& propose) {
      for (std::size_t attempt = 0; attempt < cfg.max_attempts_per_pair; ++attempt) {
        ++res.attempts;
        TruncatedTensor a = propose();
        TruncatedTensor x = tensor_exp(a);
        if (weighted_norm(x, weights) <= radius) return std::pair{std::move(a), std::move(x)};
      }
      throw SamplingError("bchprobe: rejection sampling exceeded " + std::to_string(cfg.max_attempts_per_pair) +
                          " attempts at radius " + std::to_string(radius));
    };

    // Odd pairs put y next to x to probe the local constant; even pairs are independent.
    for (std::size_t p = 0; p < cfg.pairs; ++p) {
      const auto [a, x] = accept([&] { return candidate(radius); });
      const double step = 1e-3 * radius;
      const auto [b, y] = p % 2 == 1 ? accept([&] { return a + candidate(step); }) : accept([&] { return candidate(radius); });
      const auto ratio = bch_secant_ratio(x, y, weights);
      if (!ratio) {
        ++res.pairs_skipped;
        continue;
      }
      res.max_ratio = std::max(res.max_ratio, *ratio);
      ++res.pairs_used;
    }
    out.radii.push_back(res);
  }

  if (out.radii.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : out.radii) {
      x.push_back(std::log1p(r.radius));
      y.push_back(std::log(r.max_ratio));
    }
    out.growth_slope = stats::ols(x, y).slope;
  }
  out.pass = out.growth_slope <= out.slope_bound;
  return out;
}

}  // namespace sigconc
