#include <benchmark/benchmark.h>

#include <vector>

#include "bnn/diagnostics.hpp"
#include "bnn/evaluation.hpp"
#include "bnn/features.hpp"
#include "bnn/model.hpp"
#include "bnn/random.hpp"
#include "bnn/samplers.hpp"

namespace {

using namespace bnn;

Dataset random_data(std::size_t n, std::size_t dim, std::size_t k, Rng& rng) {
  std::vector<double> f(n * dim);
  rng.fill_normal(f);
  std::vector<std::size_t> y(n);
  for (auto& v : y) v = rng.uniform_index(k);
  return Dataset(dim, k, std::move(f), std::move(y));
}

// Args: samples, input width, hidden width.
void BM_LogPosteriorWithGrad(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const NetworkSpec spec{d, {static_cast<std::size_t>(state.range(2))}, 2, Activation::ReLU};
  const Dataset data = random_data(n, d, 2, rng);
  WeightVector w(param_count(spec));
  rng.fill_normal(w);
  std::vector<double> grad(w.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_posterior_with_grad(spec, w, data, PriorSpec{}, grad));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LogPosteriorWithGrad)->Args({40, 2, 8})->Args({200, 256, 16})->Args({1000, 256, 32});

void BM_HmcStep(benchmark::State& state) {
  Rng rng(2);
  const NetworkSpec spec{2, {8}, 2, Activation::ReLU};
  const TargetDensity target = posterior_target(spec, random_data(40, 2, 2, rng), PriorSpec{});
  std::vector<double> w(param_count(spec));
  rng.fill_normal(w);
  for (double& v : w) v *= 0.1;
  double lp = target.log_density(w);
  const HmcConfig cfg{0.05, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) lp = hmc_step(w, lp, target, cfg, rng).log_target;
}
BENCHMARK(BM_HmcStep)->Arg(10)->Arg(20);

void BM_ExtractFeatures(benchmark::State& state) {
  Rng rng(3);
  const auto side = static_cast<std::size_t>(state.range(0));
  Image img(side, side);
  for (double& v : img.pixels) v = rng.uniform();
  const ConvStack stack(ConvStackSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(stack.extract(img));
}
BENCHMARK(BM_ExtractFeatures)->Arg(64)->Arg(224);

void BM_Ess(benchmark::State& state) {
  Rng rng(4);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  x[0] = rng.normal();
  for (std::size_t t = 1; t < x.size(); ++t) x[t] = 0.9 * x[t - 1] + 0.43 * rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(ess(x));
}
BENCHMARK(BM_Ess)->Arg(2000)->Arg(20000);

void BM_RocCurve(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> s(n);
  std::vector<std::size_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 2;
    s[i] = rng.normal() + static_cast<double>(y[i]);
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_curve(s, y));
}
BENCHMARK(BM_RocCurve)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
