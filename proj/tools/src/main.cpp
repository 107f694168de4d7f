#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "sigconc/harness.hpp"

namespace h = sigconc::harness;

int main(int argc, char** argv) {
  CLI::App app{"Truncated signatures of Gaussian paths and concentration experiments"};
  app.require_subcommand(1);

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 1;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "sample Gaussian paths to Path CSV"},
      {"sig", "truncated signatures of paths in a CSV"},
      {"logsig", "log-signatures in the Lyndon basis"},
      {"tail", "empirical tail curve and exponent fit"},
      {"variance", "second and fourth moments against references"},
      {"scaling", "second-moment ratio across two horizons"},
      {"meanconc", "weighted-norm mean concentration"},
      {"bchprobe", "Lipschitz growth of the tensor logarithm"},
      {"smallball", "small-ball probabilities against 2k eps^(1/k)"},
      {"hyper", "L4/L2 moment ratio against 3^(k/2)"},
      {"plot", "SVG of tail curves with exp(-t^(2/k)) references"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_file, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  h::ExperimentConfig config;
  try {
    config = h::load_config(config_file, h::parse_experiment(name));
  } catch (const h::ConfigError& e) {
    std::cerr << "sigconc " << name << ": " << e.what() << "\n";
    return 1;
  }
  if (seed) config.seed = *seed;
  if (!out_dir.empty()) config.output_dir = out_dir;

  const h::RunResult result = h::run(config, h::RunOptions{threads});
  try {
    h::write_outputs(result, config.output_dir);
  } catch (const std::exception& e) {
    std::cerr << "sigconc " << name << ": " << e.what() << "\n";
    return 2;
  }
  if (result.status != 0) std::cerr << "sigconc " << name << ": " << result.message << "\n";
  return result.status;
}
