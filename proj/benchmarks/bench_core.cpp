#include <benchmark/benchmark.h>

#include <random>

#include "sigconc/gaussian.hpp"
#include "sigconc/lie.hpp"
#include "sigconc/signature.hpp"
#include "sigconc/tensor.hpp"

using namespace sigconc;

namespace {

TruncatedTensor random_tensor(int d, int m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  TruncatedTensor t(d, m);
  for (double& c : t.coords()) c = normal(gen);
  t.coords()[0] = 1.0;
  return t;
}

std::vector<double> random_increments(int d, int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 0.05);
  std::vector<double> dx(static_cast<std::size_t>(d) * n);
  for (double& x : dx) x = normal(gen);
  return dx;
}

void BM_TensorProduct(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0)), m = static_cast<int>(state.range(1));
  const auto a = random_tensor(d, m, 1), b = random_tensor(d, m, 2);
  for (auto _ : state) benchmark::DoNotOptimize(tensor_product(a, b));
}
BENCHMARK(BM_TensorProduct)->Args({2, 4})->Args({2, 8})->Args({3, 5})->Args({5, 4});

void BM_TensorLog(benchmark::State& state) {
  const auto g = random_tensor(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(tensor_log(g));
}
BENCHMARK(BM_TensorLog)->Args({2, 4})->Args({3, 5});

void BM_Signature(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0)), m = static_cast<int>(state.range(1)), n = 512;
  const auto dx = random_increments(d, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(signature_of_increments(dx, d, m));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Signature)->Args({2, 2})->Args({2, 3})->Args({2, 5})->Args({3, 4});

void BM_LogSignatureLyndon(benchmark::State& state) {
  const int d = 2, m = static_cast<int>(state.range(0));
  const auto sig = signature_of_increments(random_increments(d, 64, 5), d, m);
  for (auto _ : state) benchmark::DoNotOptimize(tensor_to_lyndon(tensor_log(sig)));
}
BENCHMARK(BM_LogSignatureLyndon)->Arg(3)->Arg(5);

void BM_SamplePaths(benchmark::State& state) {
  const GaussianModel model = state.range(0) == 0   ? GaussianModel{BrownianMotion{}, 2}
                              : state.range(0) == 1 ? GaussianModel{FractionalBrownianMotion{0.75}, 2}
                                                    : GaussianModel{OrnsteinUhlenbeck{1.0, OuStart::Zero}, 2};
  const SampleGrid grid{static_cast<int>(state.range(1)), 1.0};
  const PathSampler sampler(model, grid);
  std::uint64_t index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(SeedSpec{7}, index++));
}
BENCHMARK(BM_SamplePaths)->Args({0, 512})->Args({1, 256})->Args({1, 1024})->Args({2, 512});

}  // namespace
BENCHMARK_MAIN();
