#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sigconc/errors.hpp"
#include "sigconc/harness.hpp"
#include "sigconc/io.hpp"

namespace sigconc::harness {

namespace {

using json = nlohmann::json;

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names{
      {Experiment::Simulate, "simulate"}, {Experiment::Sig, "sig"},
      {Experiment::Logsig, "logsig"},     {Experiment::Tail, "tail"},
      {Experiment::Variance, "variance"}, {Experiment::Scaling, "scaling"},
      {Experiment::Meanconc, "meanconc"}, {Experiment::Bchprobe, "bchprobe"},
      {Experiment::Smallball, "smallball"}, {Experiment::Hyper, "hyper"},
      {Experiment::Plot, "plot"}};
  return names;
}

std::set<std::string> allowed_keys(Experiment e) {
  std::set<std::string> keys{"experiment", "seed", "output"};
  auto add = [&](std::initializer_list<const char*> more) { keys.insert(more.begin(), more.end()); };
  switch (e) {
    case Experiment::Simulate: add({"model", "grid", "samples", "layout"}); break;
    case Experiment::Sig:
    case Experiment::Logsig: add({"input", "m"}); break;
    case Experiment::Tail:
      add({"model", "grid", "feature", "samples", "quantile_range", "tail_grid", "alpha_range", "min_r_squared",
           "svg", "reference_k"});
      break;
    case Experiment::Variance:
      add({"model", "grid", "feature", "samples", "refine_grids", "se_multiple", "rel_tol"});
      break;
    case Experiment::Scaling: add({"model", "grid", "feature", "samples", "horizons", "rel_tol"}); break;
    case Experiment::Meanconc:
      add({"model", "grid", "m", "weights", "feature_kind", "n_grid", "reps", "reference_samples", "slope_range"});
      break;
    case Experiment::Bchprobe: add({"d", "m", "radii", "pairs", "weights", "max_attempts"}); break;
    case Experiment::Smallball: add({"model", "grid", "feature", "samples", "epsilons"}); break;
    case Experiment::Hyper: add({"model", "grid", "feature", "samples", "resamples"}); break;
    case Experiment::Plot: add({"inputs", "reference_k"}); break;
  }
  return keys;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + where + key + "'");
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing required key '" + where + key + "'");
  return obj.at(key);
}

double as_double(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError(name + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(name + " must be finite");
  return x;
}

long long as_int(const json& v, const std::string& name) {
  if (!v.is_number_integer()) throw ConfigError(name + " must be an integer");
  return v.get<long long>();
}

std::size_t as_count(const json& v, const std::string& name, long long min = 1) {
  const long long x = as_int(v, name);
  if (x < min) throw ConfigError(name + " must be >= " + std::to_string(min) + " (got " + std::to_string(x) + ")");
  return static_cast<std::size_t>(x);
}

std::string as_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError(name + " must be a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& name) {
  if (!v.is_boolean()) throw ConfigError(name + " must be true or false");
  return v.get<bool>();
}

std::vector<double> as_doubles(const json& v, const std::string& name) {
  if (!v.is_array() || v.empty()) throw ConfigError(name + " must be a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_double(v[i], name + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<long long> as_ints(const json& v, const std::string& name) {
  if (!v.is_array() || v.empty()) throw ConfigError(name + " must be a non-empty array of integers");
  std::vector<long long> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_int(v[i], name + "[" + std::to_string(i) + "]"));
  return out;
}

std::pair<double, double> as_range(const json& v, const std::string& name) {
  const auto xs = as_doubles(v, name);
  if (xs.size() != 2) throw ConfigError(name + " must have exactly two entries");
  if (!(xs[0] < xs[1])) throw ConfigError(name + " must be increasing");
  return {xs[0], xs[1]};
}

GaussianModel parse_model(const json& v) {
  if (!v.is_object()) throw ConfigError("model must be an object");
  const std::string kind = as_string(require(v, "kind", "model."), "model.kind");
  GaussianModel model;
  if (kind == "bm") {
    reject_unknown(v, {"kind", "d"}, "model.");
    model.kind = BrownianMotion{};
  } else if (kind == "fbm") {
    reject_unknown(v, {"kind", "d", "hurst"}, "model.");
    model.kind = FractionalBrownianMotion{as_double(require(v, "hurst", "model."), "model.hurst")};
  } else if (kind == "ou") {
    reject_unknown(v, {"kind", "d", "theta", "start"}, "model.");
    OrnsteinUhlenbeck ou{as_double(require(v, "theta", "model."), "model.theta")};
    const std::string start = as_string(require(v, "start", "model."), "model.start");
    if (start == "zero")
      ou.start = OuStart::Zero;
    else if (start == "stationary")
      ou.start = OuStart::Stationary;
    else
      throw ConfigError("model.start must be \"zero\" or \"stationary\"");
    model.kind = ou;
  } else {
    throw ConfigError("model.kind must be one of bm, fbm, ou (got \"" + kind + "\")");
  }
  model.dim = static_cast<int>(as_count(require(v, "d", "model."), "model.d"));
  try {
    model.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return model;
}

SampleGrid parse_grid(const json& v) {
  if (!v.is_object()) throw ConfigError("grid must be an object");
  reject_unknown(v, {"n_steps", "horizon"}, "grid.");
  SampleGrid g;
  g.n_steps = static_cast<int>(as_count(require(v, "n_steps", "grid."), "grid.n_steps"));
  g.horizon = as_double(require(v, "horizon", "grid."), "grid.horizon");
  if (!(g.horizon > 0.0)) throw ConfigError("grid.horizon must be positive");
  return g;
}

Word as_word(const json& v, const std::string& name) {
  Word w;
  for (long long l : as_ints(v, name)) w.push_back(static_cast<int>(l));
  return w;
}

Feature parse_feature(const json& v, int d) {
  if (!v.is_object() || v.size() != 1) throw ConfigError("feature must be {\"word\": [...]} or {\"area\": [i, j]}");
  Feature f;
  if (v.contains("word")) {
    f = CoordinateFeature{as_word(v.at("word"), "feature.word")};
  } else if (v.contains("area")) {
    const Word ij = as_word(v.at("area"), "feature.area");
    if (ij.size() != 2) throw ConfigError("feature.area must have exactly two indices");
    f = AreaFeature{ij[0], ij[1]};
  } else {
    reject_unknown(v, {"word", "area"}, "feature.");
  }
  try {
    validate_feature(f, d);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return f;
}

WeightScheme parse_weights(const json& v) {
  if (!v.is_object()) throw ConfigError("weights must be an object");
  const std::string scheme = as_string(require(v, "scheme", "weights."), "weights.scheme");
  if (scheme == "unit") {
    reject_unknown(v, {"scheme"}, "weights.");
    return UnitWeights{};
  }
  if (scheme == "factorial") {
    reject_unknown(v, {"scheme"}, "weights.");
    return FactorialWeights{};
  }
  if (scheme == "geometric_factorial") {
    reject_unknown(v, {"scheme", "beta"}, "weights.");
    const double beta = as_double(require(v, "beta", "weights."), "weights.beta");
    if (!(beta > 0.0)) throw ConfigError("weights.beta must be positive");
    return GeometricFactorialWeights{beta};
  }
  if (scheme == "optimal") {
    reject_unknown(v, {"scheme", "sigma"}, "weights.");
    const double sigma = as_double(require(v, "sigma", "weights."), "weights.sigma");
    if (!(sigma > 0.0)) throw ConfigError("weights.sigma must be positive");
    return OptimalWeights{sigma};
  }
  throw ConfigError("weights.scheme must be one of unit, factorial, geometric_factorial, optimal");
}

int parse_m(const json& v) {
  const long long m = as_int(v, "m");
  if (m < 1 || m > 12) throw ConfigError("m must lie in 1..12");
  return static_cast<int>(m);
}

void check_probability_range(double lo, double hi, const std::string& name) {
  if (!(lo > 0.0 && hi < 1.0)) throw ConfigError(name + " must lie strictly inside (0, 1)");
}

}  // namespace

std::string experiment_name(Experiment e) {
  for (const auto& [kind, name] : experiment_names())
    if (kind == e) return name;
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [kind, n] : experiment_names())
    if (n == name) return kind;
  throw ConfigError("unknown experiment \"" + name + "\"");
}

ExperimentConfig parse_config(const std::string& json_text, Experiment experiment,
                              const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(root, allowed_keys(experiment), "");

  ExperimentConfig c;
  c.experiment = experiment;
  c.base_dir = base_dir;
  if (root.contains("experiment")) {
    const std::string named = as_string(root["experiment"], "experiment");
    if (named != experiment_name(experiment))
      throw ConfigError("experiment \"" + named + "\" does not match subcommand " + experiment_name(experiment));
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned() && !(root["seed"].is_number_integer() && root["seed"].get<long long>() >= 0))
      throw ConfigError("seed must be a non-negative integer");
    c.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("output")) c.output_dir = as_string(root["output"], "output");

  const bool needs_model = allowed_keys(experiment).count("model") > 0;
  if (needs_model) {
    c.model = parse_model(require(root, "model", ""));
    if (root.contains("grid")) c.grid = parse_grid(root["grid"]);
    try {
      c.grid.validate();
      if (std::holds_alternative<FractionalBrownianMotion>(c.model->kind) && c.grid.n_steps > kMaxFbmSteps)
        throw DomainError("grid.n_steps exceeds the fBm limit of " + std::to_string(kMaxFbmSteps));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (root.contains("m")) c.m = parse_m(root["m"]);
  if (root.contains("feature")) c.feature = parse_feature(root["feature"], c.model->dim);
  if (root.contains("samples")) c.samples = as_count(root["samples"], "samples");
  if (root.contains("weights")) c.weights = parse_weights(root["weights"]);

  switch (experiment) {
    case Experiment::Simulate:
      c.samples = as_count(require(root, "samples", ""), "samples");
      if (root.contains("layout")) {
        const std::string layout = as_string(root["layout"], "layout");
        if (layout == "stacked")
          c.layout = Layout::Stacked;
        else if (layout == "per_path")
          c.layout = Layout::PerPath;
        else
          throw ConfigError("layout must be \"stacked\" or \"per_path\"");
      }
      break;
    case Experiment::Sig:
    case Experiment::Logsig:
      c.inputs = {as_string(require(root, "input", ""), "input")};
      c.m = parse_m(require(root, "m", ""));
      break;
    case Experiment::Tail:
      if (!c.feature) throw ConfigError("missing required key 'feature'");
      if (c.samples < kMinTailSamples)
        throw ConfigError("samples must be >= " + std::to_string(kMinTailSamples) + " for tail fits");
      if (root.contains("quantile_range")) std::tie(c.q_lo, c.q_hi) = as_range(root["quantile_range"], "quantile_range");
      check_probability_range(c.q_lo, c.q_hi, "quantile_range");
      if (root.contains("tail_grid")) {
        const json& g = root["tail_grid"];
        if (!g.is_object()) throw ConfigError("tail_grid must be an object");
        reject_unknown(g, {"lo", "hi", "points"}, "tail_grid.");
        if (g.contains("lo")) c.tail_grid.lo = as_double(g["lo"], "tail_grid.lo");
        if (g.contains("hi")) c.tail_grid.hi = as_double(g["hi"], "tail_grid.hi");
        if (g.contains("points")) c.tail_grid.points = static_cast<int>(as_count(g["points"], "tail_grid.points", 2));
        if (!(c.tail_grid.lo < c.tail_grid.hi)) throw ConfigError("tail_grid.lo must be below tail_grid.hi");
        check_probability_range(c.tail_grid.lo, c.tail_grid.hi, "tail_grid");
      }
      if (root.contains("alpha_range")) c.alpha_range = as_range(root["alpha_range"], "alpha_range");
      if (root.contains("min_r_squared")) c.min_r_squared = as_double(root["min_r_squared"], "min_r_squared");
      if (root.contains("svg")) c.svg = as_bool(root["svg"], "svg");
      break;
    case Experiment::Variance:
      if (!c.feature) throw ConfigError("missing required key 'feature'");
      if (c.samples < 100) throw ConfigError("samples must be >= 100");
      if (root.contains("refine_grids")) {
        const auto g = as_ints(root["refine_grids"], "refine_grids");
        if (g.size() != 2 || g[0] < 1 || g[1] <= g[0])
          throw ConfigError("refine_grids must be two increasing positive step counts");
        c.refine_grids = std::pair<int, int>{static_cast<int>(g[0]), static_cast<int>(g[1])};
      }
      if (root.contains("se_multiple")) c.se_multiple = as_double(root["se_multiple"], "se_multiple");
      if (root.contains("rel_tol")) c.rel_tol = as_double(root["rel_tol"], "rel_tol");
      if (c.se_multiple < 0.0 || c.rel_tol < 0.0) throw ConfigError("se_multiple and rel_tol must be non-negative");
      break;
    case Experiment::Scaling:
      if (!c.feature) throw ConfigError("missing required key 'feature'");
      if (c.samples < 100) throw ConfigError("samples must be >= 100");
      if (root.contains("horizons")) c.horizons = as_range(root["horizons"], "horizons");
      if (!(c.horizons.first > 0.0)) throw ConfigError("horizons must be positive");
      c.rel_tol = 0.1;
      if (root.contains("rel_tol")) c.rel_tol = as_double(root["rel_tol"], "rel_tol");
      if (!(c.rel_tol > 0.0)) throw ConfigError("rel_tol must be positive");
      break;
    case Experiment::Meanconc: {
      c.m = parse_m(require(root, "m", ""));
      for (long long n : as_ints(require(root, "n_grid", ""), "n_grid")) {
        if (n < 1) throw ConfigError("n_grid entries must be positive");
        c.n_grid.push_back(static_cast<std::size_t>(n));
      }
      for (std::size_t i = 1; i < c.n_grid.size(); ++i)
        if (c.n_grid[i] <= c.n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
      if (root.contains("reps")) c.reps = as_count(root["reps"], "reps", 2);
      c.reference_samples = as_count(require(root, "reference_samples", ""), "reference_samples");
      if (c.reference_samples < 10 * c.n_grid.back())
        throw ConfigError("reference_samples must be at least 10 * max(n_grid) = " +
                          std::to_string(10 * c.n_grid.back()));
      if (root.contains("feature_kind")) {
        const std::string kind = as_string(root["feature_kind"], "feature_kind");
        if (kind == "signature")
          c.feature_kind = FeatureKind::Signature;
        else if (kind == "log_signature")
          c.feature_kind = FeatureKind::LogSignature;
        else
          throw ConfigError("feature_kind must be \"signature\" or \"log_signature\"");
      }
      if (root.contains("slope_range")) c.slope_range = as_range(root["slope_range"], "slope_range");
      break;
    }
    case Experiment::Bchprobe:
      c.d = static_cast<int>(as_count(require(root, "d", ""), "d"));
      c.m = parse_m(require(root, "m", ""));
      c.radii = as_doubles(require(root, "radii", ""), "radii");
      for (std::size_t i = 0; i < c.radii.size(); ++i) {
        if (!(c.radii[i] > 0.0)) throw ConfigError("radii must be positive");
        if (i > 0 && !(c.radii[i] > c.radii[i - 1])) throw ConfigError("radii must be increasing");
      }
      if (root.contains("pairs")) c.pairs = as_count(root["pairs"], "pairs", 100);
      if (root.contains("max_attempts")) c.max_attempts = as_count(root["max_attempts"], "max_attempts");
      break;
    case Experiment::Smallball:
      if (!c.feature) throw ConfigError("missing required key 'feature'");
      if (c.samples < 10000) throw ConfigError("samples must be >= 10000 for small-ball curves");
      if (root.contains("epsilons")) c.epsilons = as_doubles(root["epsilons"], "epsilons");
      for (double e : c.epsilons)
        if (!(e > 0.0 && e <= 1.0)) throw ConfigError("epsilons must lie in (0, 1]");
      break;
    case Experiment::Hyper:
      if (!c.feature) throw ConfigError("missing required key 'feature'");
      if (c.samples < 10000) throw ConfigError("samples must be >= 10000 for moment ratios");
      if (root.contains("resamples")) c.resamples = as_count(root["resamples"], "resamples", 2);
      break;
    case Experiment::Plot: {
      const json& inputs = require(root, "inputs", "");
      if (!inputs.is_array()) throw ConfigError("inputs must be an array of file names");
      for (std::size_t i = 0; i < inputs.size(); ++i)
        c.inputs.push_back(as_string(inputs[i], "inputs[" + std::to_string(i) + "]"));
      break;
    }
  }
  if (root.contains("reference_k")) {
    for (long long k : as_ints(root["reference_k"], "reference_k")) {
      if (k < 1 || k > 12) throw ConfigError("reference_k entries must lie in 1..12");
      c.reference_k.push_back(static_cast<int>(k));
    }
  }
  if (experiment == Experiment::Plot && c.inputs.empty() && c.reference_k.empty())
    throw ConfigError("plot needs at least one input curve or reference_k entry");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file, Experiment experiment) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), experiment, file.parent_path());
}

}  // namespace sigconc::harness
