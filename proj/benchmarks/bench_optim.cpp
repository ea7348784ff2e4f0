#include <benchmark/benchmark.h>

#include <numeric>

#include "eveopt/optim.hpp"
#include "eveopt/problems.hpp"
#include "eveopt/rng.hpp"

using namespace eveopt;

namespace {

optim::Vector random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  optim::Vector v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

void BM_AdamStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const optim::EveHyper hyper;
  auto adam = optim::AdamState::zeros(n);
  auto params = random_vector(n, 1);
  const auto grad = random_vector(n, 2);
  for (auto _ : state) {
    auto out = optim::adam_step(hyper, adam, params, grad, 1e-3);
    adam = std::move(out.state);
    params = std::move(out.params);
    benchmark::DoNotOptimize(params.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AdamStep)->Range(64, 1 << 16);

void BM_EveStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const optim::EveHyper hyper;
  auto eve = optim::EveState::zeros(n);
  auto params = random_vector(n, 1);
  const auto grad = random_vector(n, 2);
  double f = 10.0;
  for (auto _ : state) {
    auto out = optim::eve_step(hyper, eve, params, grad, f);
    eve = std::move(out.state);
    params = std::move(out.params);
    f *= 0.9999;
    benchmark::DoNotOptimize(params.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EveStep)->Range(64, 1 << 16);

void BM_MlpEval(benchmark::State& state) {
  const auto batch_size = static_cast<std::size_t>(state.range(0));
  const auto data = problems::make_blobs(1, 1024, 8, 4);
  const problems::MlpArch arch{{8, 32, 4}, problems::Activation::tanh};
  const auto params = problems::glorot_init(arch, 3);
  std::vector<std::size_t> indices(batch_size);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  for (auto _ : state) {
    auto eval = problems::mlp_eval(arch, params, data, indices);
    benchmark::DoNotOptimize(eval.loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpEval)->Arg(32)->Arg(128)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
