#include <benchmark/benchmark.h>

#include <vector>

#include "setadam/rng.hpp"
#include "setadam/update_rules.hpp"

using namespace setadam;

namespace {

// A layered parameter vector shaped like a small conv net: a mix of large
// weight tensors and short bias vectors.
LayerPartition bench_partition() {
  return LayerPartition::from_sizes(
      {1728, 64, 36864, 64, 73728, 128, 147456, 128, 512, 10});
}

struct Fixture {
  ModelParams params;
  GradientSnapshot grad;
  MomentState state;
  HyperParams hp;

  Fixture() : params(ModelParams::make(bench_partition(), 0.1)) {
    const std::size_t d = params.values.size();
    grad.values.resize(d);
    CounterRng rng(1);
    for (real& g : grad.values) g = static_cast<real>(rng.next_normal()) * 0.01;
    state = MomentState::zeros(d);
    hp.epsilon = 1e-5;
    hp.tau = 0.5;
  }
};

void BM_SgdMomentumStep(benchmark::State& bench) {
  Fixture f;
  for (auto _ : bench) {
    benchmark::DoNotOptimize(sgd_momentum_step(f.params, f.grad, f.state, f.hp));
  }
}
BENCHMARK(BM_SgdMomentumStep);

void BM_AdamStep(benchmark::State& bench) {
  Fixture f;
  for (auto _ : bench) {
    benchmark::DoNotOptimize(adam_step(f.params, f.grad, f.state, f.hp));
  }
}
BENCHMARK(BM_AdamStep);

void BM_AdamStarStep(benchmark::State& bench) {
  Fixture f;
  for (auto _ : bench) {
    benchmark::DoNotOptimize(adam_star_step(f.params, f.grad, f.state, f.hp));
  }
}
BENCHMARK(BM_AdamStarStep);

void BM_AdaBeliefStep(benchmark::State& bench) {
  Fixture f;
  for (auto _ : bench) {
    benchmark::DoNotOptimize(
        adabelief_step(f.params, f.grad, f.state, f.hp, AdaBeliefForm::reformulated));
  }
}
BENCHMARK(BM_AdaBeliefStep);

// The interesting ratio: the three extra per-layer passes of SET-Adam over
// plain Adam.
void BM_SetAdamStep(benchmark::State& bench) {
  Fixture f;
  for (auto _ : bench) {
    benchmark::DoNotOptimize(set_adam_step(f.params, f.grad, f.state, f.hp));
  }
}
BENCHMARK(BM_SetAdamStep);

void BM_Cos2Angle(benchmark::State& bench) {
  std::vector<real> v(static_cast<std::size_t>(bench.range(0)));
  CounterRng rng(2);
  for (real& x : v) x = static_cast<real>(rng.next_double());
  for (auto _ : bench) {
    benchmark::DoNotOptimize(cos2_angle(v, 2));
  }
}
BENCHMARK(BM_Cos2Angle)->Arg(64)->Arg(4096)->Arg(147456);

}  // namespace

BENCHMARK_MAIN();
