#include <benchmark/benchmark.h>

#include <limits>
#include <vector>

#include "touchcs/detector.h"
#include "touchcs/frontend.h"
#include "touchcs/matrices.h"
#include "touchcs/pipeline.h"
#include "touchcs/scene.h"

namespace {

using namespace touchcs;

MatrixParams params_for(std::int64_t N) {
  return design_params(static_cast<std::size_t>(N), 5, 0.042);
}

void BM_Measure(benchmark::State& state) {
  const MatrixParams p = params_for(state.range(0));
  const RepeatedMatrix phi = build_phi_kl(p);
  Rng rng(1);
  const TouchFrame f = generate_frame(SceneConfig{.sparsity_k = 5}, phi.chunks, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(measure(phi.matrix, f.values, 40.0, rng));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.N));
}
BENCHMARK(BM_Measure)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_Detect(benchmark::State& state) {
  const MatrixParams p = params_for(state.range(0));
  const RepeatedMatrix phi = build_phi_kl(p);
  Rng rng(2);
  const TouchFrame f = generate_frame(SceneConfig{.sparsity_k = 5}, phi.chunks, rng);
  const QuantizedMeasurement q =
      quantize(measure(phi.matrix, f.values, 40.0, rng), 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect(q, p, phi.chunks));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.m));
}
BENCHMARK(BM_Detect)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_FastWalshHadamard(benchmark::State& state) {
  std::vector<double> data(static_cast<std::size_t>(state.range(0)), 1.0);
  for (auto _ : state) {
    fast_walsh_hadamard(data);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FastWalshHadamard)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 17);

// One Monte Carlo frame of the context-aware readout, end to end.
void BM_ContextAwareFrame(benchmark::State& state) {
  const MatrixParams p = params_for(state.range(0));
  const RepeatedMatrix phi = build_phi_kl(p);
  const SceneConfig scene{.sparsity_k = 5};
  const ContextAwareSettings settings{.snr_readout_db = 40.0, .vth = 2.0};
  Rng rng(3);
  for (auto _ : state) {
    const TouchFrame f = generate_frame(scene, phi.chunks, rng);
    const auto x = apply_tsp_noise(f, scene.snr_tsp_db, 1.0, rng);
    benchmark::DoNotOptimize(run_context_aware_frame(phi, p, f, x, settings, rng));
  }
}
BENCHMARK(BM_ContextAwareFrame)->Arg(10000);

void BM_RocSweep(benchmark::State& state) {
  SweepConfig cfg;
  cfg.params = {420, 5, 20, 10000};
  cfg.scene = {.sparsity_k = 5};
  cfg.vth_grid = {0.5, 1, 2, 4, 8};
  cfg.trials = 50;
  cfg.threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(roc_sweep(cfg));
}
BENCHMARK(BM_RocSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
