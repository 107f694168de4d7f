#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sigconc/errors.hpp"
#include "sigconc/harness.hpp"
#include "sigconc/io.hpp"
#include "sigconc/lie.hpp"

namespace sigconc::harness {

namespace {

using ojson = nlohmann::ordered_json;

ojson estimate_json(const stats::Estimate& e) { return ojson{{"value", e.value}, {"std_err", e.std_err}}; }

ojson model_json(const GaussianModel& m) {
  ojson j{{"name", m.name()}, {"d", m.dim}, {"rho", m.rho()}};
  if (const auto* f = std::get_if<FractionalBrownianMotion>(&m.kind)) j["hurst"] = f->hurst;
  if (const auto* ou = std::get_if<OrnsteinUhlenbeck>(&m.kind)) {
    j["theta"] = ou->theta;
    j["start"] = ou->start == OuStart::Zero ? "zero" : "stationary";
  }
  j["warnings"] = m.warnings();
  return j;
}

ojson grid_json(const SampleGrid& g) { return ojson{{"n_steps", g.n_steps}, {"horizon", g.horizon}}; }

std::string weights_json_name(const WeightScheme& w) { return scheme_name(w); }

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  for (double v : values) {
    if (!row.empty()) row += ',';
    row += io::format_double(v);
  }
  return row + "\n";
}

struct Checks {
  ojson list = ojson::array();
  bool all_pass = true;

  void add(const std::string& name, bool pass, const ojson& detail = ojson::object()) {
    ojson entry{{"name", name}, {"pass", pass}};
    for (const auto& [k, v] : detail.items()) entry[k] = v;
    list.push_back(std::move(entry));
    all_pass = all_pass && pass;
  }
};

class Runner {
 public:
  Runner(const ExperimentConfig& c, const RunOptions& o) : cfg_(c), opt_(o) {
    summary_["schema_version"] = kSchemaVersion;
    summary_["experiment"] = experiment_name(c.experiment);
    summary_["seed"] = c.seed;
  }

  RunResult execute() {
    switch (cfg_.experiment) {
      case Experiment::Simulate: simulate(); break;
      case Experiment::Sig: signature(false); break;
      case Experiment::Logsig: signature(true); break;
      case Experiment::Tail: tail(); break;
      case Experiment::Variance: variance(); break;
      case Experiment::Scaling: scaling(); break;
      case Experiment::Meanconc: meanconc(); break;
      case Experiment::Bchprobe: bchprobe(); break;
      case Experiment::Smallball: smallball(); break;
      case Experiment::Hyper: hyper(); break;
      case Experiment::Plot: plot(); break;
    }
    summary_["checks"] = checks_.list;
    summary_["all_checks_pass"] = checks_.all_pass;
    result_.files["summary.json"] = summary_.dump(2) + "\n";
    result_.status = checks_.all_pass ? 0 : 3;
    result_.message = checks_.all_pass ? "ok" : "invariant check failed: " + failed_names();
    return std::move(result_);
  }

 private:
  std::string failed_names() const {
    std::string names;
    for (const auto& c : checks_.list)
      if (!c["pass"].get<bool>()) names += (names.empty() ? "" : ", ") + c["name"].get<std::string>();
    return names;
  }

  const GaussianModel& model() const { return *cfg_.model; }
  SeedSpec seed() const { return SeedSpec{cfg_.seed}; }

  std::vector<double> draw_feature(const Feature& f, const SampleGrid& grid) const {
    const PathSampler sampler(model(), grid);
    return sample_feature(sampler, f, cfg_.samples, seed(), opt_.threads);
  }

  void describe_sampling() {
    summary_["model"] = model_json(model());
    summary_["grid"] = grid_json(cfg_.grid);
    if (cfg_.feature) summary_["feature"] = feature_label(*cfg_.feature, model().dim);
    summary_["samples"] = cfg_.samples;
  }

  std::filesystem::path resolve(const std::string& name) const {
    std::filesystem::path p(name);
    return p.is_absolute() || cfg_.base_dir.empty() ? p : cfg_.base_dir / p;
  }

  void simulate() {
    describe_sampling();
    summary_["layout"] = cfg_.layout == Layout::Stacked ? "stacked" : "per_path";
    const auto paths = sample_paths(model(), cfg_.grid, cfg_.samples, seed(), opt_.threads);
    if (cfg_.layout == Layout::Stacked) {
      std::ostringstream out;
      write_path_csv(out, paths);
      result_.files["paths.csv"] = out.str();
    } else {
      const int width = std::max<int>(5, static_cast<int>(std::to_string(paths.size() - 1).size()));
      for (std::size_t i = 0; i < paths.size(); ++i) {
        std::ostringstream out;
        write_path_csv(out, std::span<const Path>(&paths[i], 1));
        std::string id = std::to_string(i);
        id.insert(0, static_cast<std::size_t>(width) - id.size(), '0');
        result_.files["path_" + id + ".csv"] = out.str();
      }
    }
  }

  void signature(bool log) {
    const auto file = resolve(cfg_.inputs.front());
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read input " + file.string());
    const auto paths = read_path_csv(in);
    summary_["input"] = cfg_.inputs.front();
    summary_["m"] = cfg_.m;
    summary_["paths"] = paths.size();
    std::ostringstream out;
    if (log) {
      std::vector<LieCoordinates> coords;
      for (const auto& p : paths) coords.push_back(path_log_signature(p, cfg_.m));
      write_lie_csv(out, coords);
      summary_["dimension"] = coords.front().size();
      result_.files["log_signature.csv"] = out.str();
    } else {
      std::vector<TruncatedTensor> sigs;
      for (const auto& p : paths) sigs.push_back(path_signature(p, cfg_.m));
      write_tensor_csv(out, sigs);
      summary_["dimension"] = sigs.front().size();
      result_.files["signature.csv"] = out.str();
    }
  }

  void tail() {
    describe_sampling();
    const Feature& f = *cfg_.feature;
    const int k = feature_level(f);
    const auto xs = draw_feature(f, cfg_.grid);
    const double sigma = std::sqrt(stats::mean(squared(xs)));
    if (!(sigma > 0.0)) throw NumericError("tail: feature has zero L2 norm");
    const TailCurve curve = empirical_tail(xs, cfg_.tail_grid);
    const ExponentFit fit = fit_tail_exponent(curve, cfg_.q_lo, cfg_.q_hi);
    const double free_alpha = prefactor_free_exponent(curve, cfg_.q_lo, cfg_.q_hi);

    std::string csv = "threshold,scaled_threshold,survival,std_err\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
      csv += csv_row({curve.thresholds[i], curve.thresholds[i] / sigma, curve.survival[i], curve.std_err[i]});
    }
    result_.files["tail.csv"] = csv;

    const double expected = 2.0 / k;
    const auto range = cfg_.alpha_range.value_or(std::pair<double, double>{expected - 0.2, expected + 0.2});
    summary_["level"] = k;
    summary_["l2_norm"] = sigma;
    summary_["fit"] = ojson{{"alpha_hat", fit.alpha_hat}, {"c_hat", fit.c_hat},
                            {"quantile_range", {fit.q_lo, fit.q_hi}}, {"r_squared", fit.r_squared},
                            {"points_used", fit.points_used}};
    summary_["expected_alpha"] = expected;
    summary_["diagnostics"] = ojson{{"prefactor_free_alpha", free_alpha}};

    bool monotone = true;
    for (std::size_t i = 1; i < curve.survival.size(); ++i) monotone = monotone && curve.survival[i] <= curve.survival[i - 1];
    checks_.add("survival_monotone", monotone);
    checks_.add("alpha_in_range", fit.alpha_hat >= range.first && fit.alpha_hat <= range.second,
                ojson{{"alpha_hat", fit.alpha_hat}, {"range", {range.first, range.second}}});
    checks_.add("r_squared", fit.r_squared >= cfg_.min_r_squared,
                ojson{{"r_squared", fit.r_squared}, {"minimum", cfg_.min_r_squared}});

    if (cfg_.svg) {
      const std::vector<int> refs = cfg_.reference_k.empty() ? std::vector<int>{1, 2, 3, 4} : cfg_.reference_k;
      const PlotCurve pc{feature_label(f, model().dim), [&] {
                           std::vector<double> t;
                           for (double x : curve.thresholds) t.push_back(x / sigma);
                           return t;
                         }(),
                         curve.survival};
      result_.files["tail.svg"] = emit_plot(std::span<const PlotCurve>(&pc, 1), refs);
    }
  }

  static std::vector<double> squared(std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = xs[i] * xs[i];
    return out;
  }

  void variance() {
    describe_sampling();
    const Feature& f = *cfg_.feature;
    const VarianceReport r = estimate_coordinate_moments(model(), f, cfg_.grid, cfg_.samples, seed(), opt_.threads);
    summary_["second_moment"] = estimate_json(r.second_moment);
    summary_["fourth_moment"] = estimate_json(r.fourth_moment);
    std::string csv = "quantity,value,std_err\n";
    csv += "second_moment," + csv_row({r.second_moment.value, r.second_moment.std_err});
    csv += "fourth_moment," + csv_row({r.fourth_moment.value, r.fourth_moment.std_err});

    auto tolerance_check = [&](double reference, double se) {
      const double tol = std::max(cfg_.se_multiple * se, cfg_.rel_tol * std::abs(reference));
      const double err = std::abs(r.second_moment.value - reference);
      checks_.add("second_moment_matches_reference", err <= tol,
                  ojson{{"reference", reference}, {"abs_error", err}, {"tolerance", tol},
                        {"se_multiple", cfg_.se_multiple}, {"rel_tol", cfg_.rel_tol}});
    };

    if (r.reference) {
      summary_["reference"] = ojson{{"value", r.reference->value}, {"provenance", r.reference->provenance}};
      csv += "reference," + csv_row({r.reference->value, 0.0});
      tolerance_check(r.reference->value, r.second_moment.std_err);
    } else if (cfg_.refine_grids) {
      const auto [coarse, fine] = *cfg_.refine_grids;
      const ExtrapolatedMoment ex = richardson_second_moment(model(), f, cfg_.grid.horizon, coarse, fine,
                                                             cfg_.samples, SeedSpec{cfg_.seed + 1}, opt_.threads);
      const double combined = std::hypot(r.second_moment.std_err, ex.extrapolated.std_err);
      summary_["reference"] = ojson{{"value", ex.extrapolated.value},
                                    {"std_err", ex.extrapolated.std_err},
                                    {"provenance", "Richardson extrapolation in the step from grids " +
                                                       std::to_string(coarse) + "/" + std::to_string(fine)},
                                    {"coarse", estimate_json(ex.coarse)},
                                    {"fine", estimate_json(ex.fine)},
                                    {"combined_std_err", combined}};
      csv += "coarse_second_moment," + csv_row({ex.coarse.value, ex.coarse.std_err});
      csv += "fine_second_moment," + csv_row({ex.fine.value, ex.fine.std_err});
      csv += "reference," + csv_row({ex.extrapolated.value, ex.extrapolated.std_err});
      tolerance_check(ex.extrapolated.value, combined);
      report_ou_area(f, combined);
    }
    result_.files["variance.csv"] = csv;
  }

  // Both closed forms for the OU area are reported next to the estimate;
  // disagreement beyond 3 SE is flagged, never treated as a pass or fail.
  void report_ou_area(const Feature& f, double se) {
    const auto* ou = std::get_if<OrnsteinUhlenbeck>(&model().kind);
    if (!ou || !std::holds_alternative<AreaFeature>(f)) return;
    const double estimate = summary_["second_moment"]["value"].get<double>();
    ojson forms = ojson::object();
    if (cfg_.grid.horizon == 1.0) {
      const double quoted = ou_area_quoted_formula(ou->theta);
      forms["quoted_formula"] = ojson{{"value", quoted},
                                        {"discrepancy_in_se", std::abs(estimate - quoted) / se},
                                        {"flagged", std::abs(estimate - quoted) > 3.0 * se}};
    }
    const double iso = ou_area_isometry(ou->theta, cfg_.grid.horizon, ou->start);
    forms["ito_isometry"] = ojson{{"value", iso},
                                  {"discrepancy_in_se", std::abs(estimate - iso) / se},
                                  {"flagged", std::abs(estimate - iso) > 3.0 * se}};
    summary_["closed_forms"] = forms;
  }

  void scaling() {
    describe_sampling();
    summary_.erase("grid");
    summary_["n_steps"] = cfg_.grid.n_steps;
    summary_["horizons"] = {cfg_.horizons.first, cfg_.horizons.second};
    const Feature& f = *cfg_.feature;
    const ScalingReport r = horizon_scaling(model(), f, cfg_.grid.n_steps, cfg_.horizons.first, cfg_.horizons.second,
                                            cfg_.samples, seed(), opt_.threads);
    if (!r.expected) throw ConfigError("scaling: the model has no power-law horizon scaling (use bm or fbm)");
    std::string csv = "horizon,second_moment,std_err\n";
    csv += csv_row({cfg_.horizons.first, r.moment_short.value, r.moment_short.std_err});
    csv += csv_row({cfg_.horizons.second, r.moment_long.value, r.moment_long.std_err});
    result_.files["scaling.csv"] = csv;
    summary_["moment_short"] = estimate_json(r.moment_short);
    summary_["moment_long"] = estimate_json(r.moment_long);
    summary_["ratio"] = estimate_json({r.ratio, r.ratio_se});
    summary_["expected_ratio"] = *r.expected;
    const double rel = std::abs(r.ratio / *r.expected - 1.0);
    checks_.add("ratio_matches_expected", rel <= cfg_.rel_tol, ojson{{"rel_error", rel}, {"rel_tol", cfg_.rel_tol}});
  }

  void meanconc() {
    summary_["model"] = model_json(model());
    summary_["grid"] = grid_json(cfg_.grid);
    MeanConcentrationConfig mc;
    mc.model = model();
    mc.grid = cfg_.grid;
    mc.m = cfg_.m;
    mc.weights = cfg_.weights;
    mc.feature = cfg_.feature_kind;
    mc.n_grid = cfg_.n_grid;
    mc.reps = cfg_.reps;
    mc.reference_count = cfg_.reference_samples;
    mc.seed = seed();
    mc.threads = opt_.threads;
    const MeanDeviationCurve c = mean_concentration_experiment(mc);

    std::string csv = "n,deviation,std_err\n";
    for (std::size_t i = 0; i < c.n_values.size(); ++i)
      csv += csv_row({static_cast<double>(c.n_values[i]), c.deviations[i], c.deviation_se[i]});
    result_.files["meanconc.csv"] = csv;

    summary_["m"] = cfg_.m;
    summary_["weights"] = weights_json_name(c.weights);
    summary_["weight_values"] = level_weights(c.weights, cfg_.m);
    summary_["feature_kind"] = c.feature == FeatureKind::Signature ? "signature" : "log_signature";
    summary_["feature_dim"] = c.feature_dim;
    summary_["reps"] = cfg_.reps;
    summary_["reference_samples"] = cfg_.reference_samples;
    summary_["reference_error"] = c.reference_error;
    summary_["slope_hat"] = c.slope_hat;
    summary_["slope_r_squared"] = c.slope_r_squared;
    bool positive = true;
    for (double dv : c.deviations) positive = positive && dv > 0.0;
    checks_.add("deviations_positive", positive);
    checks_.add("slope_in_range", c.slope_hat >= cfg_.slope_range.first && c.slope_hat <= cfg_.slope_range.second,
                ojson{{"slope_hat", c.slope_hat}, {"range", {cfg_.slope_range.first, cfg_.slope_range.second}}});
  }

  void bchprobe() {
    BchProbeConfig bc;
    bc.d = cfg_.d;
    bc.m = cfg_.m;
    bc.radii = cfg_.radii;
    bc.pairs = cfg_.pairs;
    bc.seed = seed();
    bc.weights = cfg_.weights;
    bc.max_attempts_per_pair = cfg_.max_attempts;
    const BchProbeResult r = bch_lipschitz_probe(bc);

    std::string csv = "radius,max_ratio,pairs_used,pairs_skipped,attempts\n";
    for (const auto& rr : r.radii)
      csv += csv_row({rr.radius, rr.max_ratio, static_cast<double>(rr.pairs_used),
                      static_cast<double>(rr.pairs_skipped), static_cast<double>(rr.attempts)});
    result_.files["bchprobe.csv"] = csv;

    summary_["d"] = cfg_.d;
    summary_["m"] = cfg_.m;
    summary_["weights"] = weights_json_name(cfg_.weights);
    summary_["pairs"] = cfg_.pairs;
    summary_["growth_slope"] = r.growth_slope;
    summary_["slope_bound"] = r.slope_bound;
    if (r.radii.size() >= 2)
      checks_.add("growth_slope_bounded", r.pass, ojson{{"growth_slope", r.growth_slope}, {"bound", r.slope_bound}});
    if (cfg_.m == 1) {
      bool identity = true;
      for (const auto& rr : r.radii) identity = identity && std::abs(rr.max_ratio - 1.0) <= 1e-12;
      checks_.add("ratio_identity_at_level_one", identity);
    }
  }

  void smallball() {
    describe_sampling();
    const Feature& f = *cfg_.feature;
    const int k = feature_level(f);
    const auto xs = draw_feature(f, cfg_.grid);
    const SmallBallReport r = small_ball_curve(xs, cfg_.epsilons, k);
    std::string csv = "epsilon,probability,std_err,bound\n";
    for (const auto& p : r.points) csv += csv_row({p.epsilon, p.probability, p.std_err, p.bound});
    result_.files["smallball.csv"] = csv;
    summary_["level"] = k;
    summary_["sigma_hat"] = r.sigma_hat;
    summary_["constant"] = 2 * k;
    for (const auto& p : r.points)
      checks_.add("below_bound_eps_" + io::format_double(p.epsilon), p.probability <= p.bound,
                  ojson{{"probability", p.probability}, {"bound", p.bound}});
  }

  void hyper() {
    describe_sampling();
    const Feature& f = *cfg_.feature;
    const int k = feature_level(f);
    const auto xs = draw_feature(f, cfg_.grid);
    const HypercontractivityReport r =
        hypercontractivity_ratio(xs, k, cfg_.resamples, cfg_.seed ^ 0x9e3779b97f4a7c15ULL);
    result_.files["hyper.csv"] =
        "level,ratio,std_err,bound\n" + csv_row({static_cast<double>(k), r.ratio, r.ratio_se, r.bound});
    summary_["level"] = k;
    summary_["ratio"] = estimate_json({r.ratio, r.ratio_se});
    summary_["bound"] = r.bound;
    summary_["resamples"] = cfg_.resamples;
    checks_.add("ratio_below_bound", r.pass,
                ojson{{"ratio", r.ratio}, {"threshold", r.bound * (1.0 + 3.0 * r.ratio_se / r.ratio)}});
  }

  void plot() {
    std::vector<PlotCurve> curves;
    for (const auto& name : cfg_.inputs) {
      const auto file = resolve(name);
      std::ifstream in(file);
      if (!in) throw ConfigError("cannot read input " + file.string());
      curves.push_back(read_tail_csv(in, std::filesystem::path(name).stem().string()));
    }
    summary_["inputs"] = cfg_.inputs;
    summary_["reference_k"] = cfg_.reference_k;
    result_.files["plot.svg"] = emit_plot(curves, cfg_.reference_k);
  }

  const ExperimentConfig& cfg_;
  const RunOptions& opt_;
  ojson summary_;
  Checks checks_;
  RunResult result_;
};

RunResult failure(int status, const std::string& message) {
  RunResult r;
  r.status = status;
  r.message = message;
  return r;
}

}  // namespace

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
  try {
    return Runner(config, options).execute();
  } catch (const ConfigError& e) {
    return failure(1, e.what());
  } catch (const DomainError& e) {
    return failure(1, e.what());
  } catch (const NumericError& e) {
    return failure(2, e.what());
  } catch (const std::bad_alloc&) {
    return failure(2, "out of memory");
  }
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : result.files) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  }
}

}  // namespace sigconc::harness
