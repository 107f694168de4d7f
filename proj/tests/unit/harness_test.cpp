#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "sigconc/errors.hpp"
#include "sigconc/harness.hpp"

using namespace sigconc;
namespace h = sigconc::harness;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("sigconc_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

h::RunResult run_text(const std::string& json, h::Experiment e, unsigned threads = 1, const fs::path& base = {}) {
  return h::run(h::parse_config(json, e, base), h::RunOptions{threads});
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

const char* kAxisCsv = "t,x1,x2\n0,0,0\n1,1,0\n2,1,1\n";

}  // namespace

TEST(Harness, SigOnAxisPath) {
  TempDir dir;
  dir.write("axis.csv", kAxisCsv);
  const auto r = run_text(R"({"input": "axis.csv", "m": 2})", h::Experiment::Sig, 1, dir.path());
  ASSERT_EQ(r.status, 0) << r.message;
  std::istringstream in(r.files.at("signature.csv"));
  const auto sigs = read_tensor_csv(in);
  ASSERT_EQ(sigs.size(), 1u);
  EXPECT_EQ((sigs[0][{1, 2}]), 1.0);
  EXPECT_EQ((sigs[0][{2, 1}]), 0.0);
  EXPECT_NE(r.files.at("summary.json").find("\"schema_version\": 1"), std::string::npos);
}

TEST(Harness, LogsigOnAxisPath) {
  TempDir dir;
  dir.write("axis.csv", kAxisCsv);
  const auto r = run_text(R"({"input": "axis.csv", "m": 2})", h::Experiment::Logsig, 1, dir.path());
  ASSERT_EQ(r.status, 0) << r.message;
  EXPECT_EQ(r.files.at("log_signature.csv"), "degree,word,coefficient\n1,1,1\n1,2,1\n2,12,0.5\n");
}

TEST(Harness, VarianceSummaryCarriesReference) {
  const auto r = run_text(
      R"({"model": {"kind": "bm", "d": 2}, "grid": {"n_steps": 64, "horizon": 1}, "feature": {"word": [1, 2]},
          "samples": 2000, "seed": 5})",
      h::Experiment::Variance);
  ASSERT_EQ(r.status, 0) << r.message;
  const std::string& s = r.files.at("summary.json");
  EXPECT_TRUE(std::regex_search(s, std::regex("\"reference\": \\{\\s*\"value\": 0\\.5")));
  EXPECT_TRUE(r.files.count("variance.csv"));
}

TEST(Harness, MalformedConfigNamesField) {
  EXPECT_THROW(
      {
        try {
          h::parse_config(R"({"model": {"kind": "ou", "theta": -1, "start": "zero", "d": 2},
                              "feature": {"area": [1, 2]}, "samples": 1000})",
                          h::Experiment::Variance);
        } catch (const h::ConfigError& e) {
          EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos);
          throw;
        }
      },
      h::ConfigError);
  EXPECT_THROW(h::parse_config(R"({"input": "a.csv", "m": 2, "colour": 1})", h::Experiment::Sig), h::ConfigError);
  EXPECT_THROW(h::parse_config(R"({"model": {"kind": "bm", "d": 2, "hurst": 0.5}, "samples": 3})",
                               h::Experiment::Simulate),
               h::ConfigError);
  EXPECT_THROW(h::parse_config(R"({"input": "a.csv", "m": "two"})", h::Experiment::Sig), h::ConfigError);
  EXPECT_THROW(h::parse_config("{not json", h::Experiment::Sig), h::ConfigError);
  EXPECT_THROW(h::parse_config(R"({"experiment": "tail", "input": "a.csv", "m": 2})", h::Experiment::Sig),
               h::ConfigError);
  EXPECT_THROW(h::parse_config(R"({"model": {"kind": "bm", "d": 2}, "m": 2, "n_grid": [16, 32],
                                   "reference_samples": 32})",
                               h::Experiment::Meanconc),
               h::ConfigError);
}

TEST(Harness, ExitStatuses) {
  const auto missing = run_text(R"({"input": "does_not_exist.csv", "m": 2})", h::Experiment::Sig);
  EXPECT_EQ(missing.status, 1);
  const auto sampling = run_text(R"({"d": 2, "m": 3, "radii": [0.5], "pairs": 100})", h::Experiment::Bchprobe);
  EXPECT_EQ(sampling.status, 2);
  const auto failed = run_text(
      R"({"model": {"kind": "bm", "d": 2}, "grid": {"n_steps": 16, "horizon": 1}, "feature": {"word": [1]},
          "samples": 20000, "alpha_range": [5, 6]})",
      h::Experiment::Tail);
  EXPECT_EQ(failed.status, 3);
  EXPECT_NE(failed.message.find("alpha_in_range"), std::string::npos);
  EXPECT_TRUE(failed.files.count("summary.json"));
}

TEST(Harness, SimulateThenSigMatchesInMemory) {
  TempDir dir;
  const std::string cfg = R"({"model": {"kind": "fbm", "hurst": 0.7, "d": 2},
                              "grid": {"n_steps": 20, "horizon": 1.5}, "samples": 4, "seed": 99})";
  const auto sim = run_text(cfg, h::Experiment::Simulate);
  ASSERT_EQ(sim.status, 0) << sim.message;
  h::write_outputs(sim, dir.path());
  const auto sig = run_text(R"({"input": "paths.csv", "m": 3})", h::Experiment::Sig, 1, dir.path());
  ASSERT_EQ(sig.status, 0) << sig.message;

  const auto paths = sample_paths(GaussianModel{FractionalBrownianMotion{0.7}, 2}, SampleGrid{20, 1.5}, 4, SeedSpec{99});
  std::vector<TruncatedTensor> sigs;
  for (const auto& p : paths) sigs.push_back(path_signature(p, 3));
  std::ostringstream expected;
  write_tensor_csv(expected, sigs);
  EXPECT_EQ(sig.files.at("signature.csv"), expected.str());
}

TEST(Harness, PerPathLayout) {
  const auto sim = run_text(R"({"model": {"kind": "bm", "d": 1}, "grid": {"n_steps": 4, "horizon": 1},
                                "samples": 3, "layout": "per_path"})",
                            h::Experiment::Simulate);
  ASSERT_EQ(sim.status, 0);
  EXPECT_TRUE(sim.files.count("path_00000.csv"));
  EXPECT_TRUE(sim.files.count("path_00002.csv"));
  EXPECT_EQ(sim.files.at("path_00001.csv").substr(0, 5), "t,x1\n");
}

TEST(Harness, OutputsIndependentOfThreads) {
  const std::vector<std::pair<std::string, h::Experiment>> cases{
      {R"({"model": {"kind": "bm", "d": 2}, "grid": {"n_steps": 32, "horizon": 1}, "feature": {"area": [1, 2]},
           "samples": 3000, "seed": 1, "svg": true})",
       h::Experiment::Tail},
      {R"({"model": {"kind": "ou", "theta": 1, "start": "zero", "d": 2}, "grid": {"n_steps": 32, "horizon": 1},
           "feature": {"area": [1, 2]}, "samples": 500, "seed": 2, "refine_grids": [64, 128]})",
       h::Experiment::Variance},
      {R"({"model": {"kind": "bm", "d": 2}, "grid": {"n_steps": 16, "horizon": 1}, "m": 2,
           "n_grid": [8, 16, 32], "reps": 4, "reference_samples": 320, "seed": 3,
           "feature_kind": "log_signature"})",
       h::Experiment::Meanconc},
      {R"({"model": {"kind": "bm", "d": 2}, "grid": {"n_steps": 16, "horizon": 1}, "feature": {"area": [1, 2]},
           "samples": 10000, "seed": 4, "resamples": 20})",
       h::Experiment::Hyper},
  };
  for (const auto& [cfg, e] : cases) {
    const auto a = run_text(cfg, e, 1);
    const auto b = run_text(cfg, e, 3);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.files, b.files) << h::experiment_name(e);
    EXPECT_EQ(a.files.at("summary.json").find("thread"), std::string::npos);
  }
}

TEST(Plot, ReferenceCurves) {
  const std::vector<int> ks{1, 2, 3, 4};
  const std::string svg = h::emit_plot({}, ks);
  EXPECT_EQ(count(svg, "<polyline"), 4u);
  EXPECT_EQ(svg, h::emit_plot({}, ks));
  // Heavier tails for larger k: the curves stop at the 1e-6 floor later.
  std::vector<std::size_t> lengths;
  for (std::size_t pos = svg.find("points=\""); pos != std::string::npos; pos = svg.find("points=\"", pos + 1))
    lengths.push_back(svg.find('"', pos + 8) - pos);
  ASSERT_EQ(lengths.size(), 4u);
  EXPECT_LT(lengths[0], lengths[1]);
}

TEST(Plot, EmpiricalPlusReference) {
  const h::PlotCurve c{"A1,2", {0.5, 1.0, 2.0}, {0.6, 0.3, 0.05}};
  const std::vector<int> ks{2};
  const std::string svg = h::emit_plot(std::span<const h::PlotCurve>(&c, 1), ks);
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_NE(svg.find("A1,2"), std::string::npos);
  EXPECT_THROW(h::emit_plot({}, {}), DomainError);
}

TEST(Plot, ExperimentReadsTailCsv) {
  TempDir dir;
  dir.write("curve.csv", "threshold,scaled_threshold,survival,std_err\n1,0.5,0.5,0.01\n2,1,0.1,0.01\n");
  const auto r = run_text(R"({"inputs": ["curve.csv"], "reference_k": [1, 2]})", h::Experiment::Plot, 1, dir.path());
  ASSERT_EQ(r.status, 0) << r.message;
  EXPECT_EQ(count(r.files.at("plot.svg"), "<polyline"), 3u);
}

#ifdef SIGCONC_CLI
TEST(Cli, ExitCodes) {
  TempDir dir;
  const auto bad = dir.write("bad.json", R"({"model": {"kind": "ou", "theta": -1, "start": "zero", "d": 2},
                                             "feature": {"area": [1, 2]}, "samples": 1000})");
  const std::string err = (dir.path() / "err.txt").string();
  const int bad_status = std::system((std::string(SIGCONC_CLI) + " variance --config " + bad.string() + " 2> " + err).c_str());
  EXPECT_EQ(WEXITSTATUS(bad_status), 1);
  std::ifstream e(err);
  std::string msg((std::istreambuf_iterator<char>(e)), std::istreambuf_iterator<char>());
  EXPECT_NE(msg.find("theta"), std::string::npos);

  dir.write("axis.csv", kAxisCsv);
  const auto good = dir.write("sig.json", R"({"input": "axis.csv", "m": 2})");
  const fs::path out = dir.path() / "out";
  const int ok = std::system((std::string(SIGCONC_CLI) + " sig --config " + good.string() + " --out " + out.string()).c_str());
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  EXPECT_TRUE(fs::exists(out / "signature.csv"));
  EXPECT_TRUE(fs::exists(out / "summary.json"));

  const int usage = std::system((std::string(SIGCONC_CLI) + " nonsense > /dev/null 2>&1").c_str());
  EXPECT_NE(WEXITSTATUS(usage), 0);
}
#endif
