#include <benchmark/benchmark.h>

#include "tniso/analysis.hpp"
#include "tniso/random.hpp"
#include "tniso/robustness.hpp"

using namespace tniso;

namespace {

IsometricEncoding random_encoding(Eigen::Index ds, Eigen::Index df, Eigen::Index dr, Rng& rng) {
  return IsometricEncoding(SubsystemDecomposition(ds, df, dr, haar_unitary(ds * df + dr, rng)),
                           random_full_rank_state(df, rng));
}

void BM_DetectStructure(benchmark::State& state) {
  const auto ds = state.range(0);
  Rng rng = stream(1, 0);
  const Superoperator s = random_encoding(ds, 2, 1, rng).superoperator();
  for (auto _ : state) benchmark::DoNotOptimize(detect_structure(s));
}
BENCHMARK(BM_DetectStructure)->Arg(2)->Arg(3)->Arg(4);

void BM_CesaroSpectral(benchmark::State& state) {
  Rng rng = stream(2, 0);
  const KrausChannel e = random_channel(state.range(0), state.range(0), 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(cesaro_projector(e));
}
BENCHMARK(BM_CesaroSpectral)->Arg(2)->Arg(4)->Arg(8);

void BM_CesaroIterative(benchmark::State& state) {
  Rng rng = stream(3, 0);
  const KrausChannel e = random_unital_channel(state.range(0), 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(cesaro_projector(e, {.method = CesaroMethod::iterative}));
}
BENCHMARK(BM_CesaroIterative)->Arg(2)->Arg(4)->Arg(8);

void BM_ClassifyRepetition(benchmark::State& state) {
  const RepetitionExample ex = make_repetition_example(0.4);
  for (auto _ : state) benchmark::DoNotOptimize(classify(ex.encoding, ex.noise));
}
BENCHMARK(BM_ClassifyRepetition)->Unit(benchmark::kMillisecond);

void BM_SimulateMixedFlip(benchmark::State& state) {
  const RepetitionExample ex = make_repetition_example(0.4);
  const KrausChannel e = make_example2_channel(0.4, 0.05);
  const DensityOperator rho0 = encode(ex.encoding, DensityOperator::maximally_mixed(2));
  SimulationOptions opts;
  opts.keep_states = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_iterated(e, ex.recovery, rho0, static_cast<std::size_t>(state.range(0)), opts));
  }
}
BENCHMARK(BM_SimulateMixedFlip)->Arg(10)->Arg(500);

}  // namespace
BENCHMARK_MAIN();
