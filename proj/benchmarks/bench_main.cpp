#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hqtlp/autodiff.hpp"
#include "hqtlp/baselines.hpp"
#include "hqtlp/dyngraph.hpp"
#include "hqtlp/model.hpp"
#include "hqtlp/random.hpp"
#include "hqtlp/tensor.hpp"

using namespace hqtlp;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(r, c);
  for (double& x : t.data()) x = u(rng);
  return t;
}

Tensor random_graph(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (u(rng) < 0.3) a(i, j) = a(j, i) = 1.0 + 10.0 * u(rng);
  return a;
}

struct GeneratorFixture {
  model::ModelDims dims;
  model::GeneratorParams params;
  std::vector<Tensor> a_hats;
  std::vector<Tensor> noise;
  Tensor target;

  GeneratorFixture(std::size_t n, std::size_t window) {
    dims.nodes = n;
    Rng rng(1);
    params = model::GeneratorParams::init(dims, rng);
    std::mt19937_64 g(2);
    for (std::size_t l = 0; l < window; ++l) a_hats.push_back(graph::gcn_normalize(random_graph(n, g)));
    noise = model::draw_noise(rng, window, dims);
    target = Tensor(1, dims.pairs(), 0.5);
  }
};

}  // namespace

static void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(0);
  const Tensor a = random_tensor(n, n, rng);
  const Tensor b = random_tensor(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * 2 * n * n * n);
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128)->Arg(256);

static void BM_GeneratorForward(benchmark::State& state) {
  const GeneratorFixture f(static_cast<std::size_t>(state.range(0)), 10);
  for (auto _ : state) {
    Tape tape;
    const auto g = model::bind_generator(tape, f.params, false);
    benchmark::DoNotOptimize(model::generator_forward(tape, g, f.a_hats, f.noise).value());
  }
}
BENCHMARK(BM_GeneratorForward)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_GeneratorForwardBackward(benchmark::State& state) {
  const GeneratorFixture f(static_cast<std::size_t>(state.range(0)), 10);
  for (auto _ : state) {
    Tape tape;
    const auto g = model::bind_generator(tape, f.params, true);
    const Var pred = model::generator_forward(tape, g, f.a_hats, f.noise);
    benchmark::DoNotOptimize(tape.backward(mse(pred, tape.constant(f.target))));
  }
}
BENCHMARK(BM_GeneratorForwardBackward)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Nmf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  const Tensor v = random_graph(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(baselines::nmf(v, n / 8, 100, 7));
}
BENCHMARK(BM_Nmf)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
