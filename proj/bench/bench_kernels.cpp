// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include "parity/games.hpp"
#include "parity/kernels.hpp"
#include "parity/quantum.hpp"
#include "parity/random.hpp"

using namespace parity;

namespace {

void BM_FourierSerial(benchmark::State& state) {
  const unsigned m = static_cast<unsigned>(state.range(0));
  Rng rng = make_rng(1);
  const auto table = random_stochastic_table(m, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::fourier_forward_serial(table, m, 3));
}

void BM_FourierParallel(benchmark::State& state) {
  const unsigned m = static_cast<unsigned>(state.range(0));
  Rng rng = make_rng(1);
  const auto table = random_stochastic_table(m, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::fourier_forward(table, m, 3));
}

template <Execution Exec>
void BM_EvolveAll(benchmark::State& state) {
  const unsigned m = static_cast<unsigned>(state.range(0));
  const PathedHilbert h = PathedHilbert::single(m, 2);
  const DensityState prep = random_state(h, 3, 2);
  const BoxProgram prog = random_local_program(m, 3, {2, 2, true}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_all(prep, prog, Exec));
}

template <Execution Exec>
void BM_RunExperiment(benchmark::State& state) {
  const PathedHilbert h(2, static_cast<unsigned>(state.range(0)), {2, 2});
  const DensityState prep = random_state(h, 5, 2);
  const BoxProgram prog = random_local_program(h.paths(), 2, {2, 2, true}, 6);
  const Povm povm = random_povm(h, 2, 7);
  ExperimentOptions opts;
  opts.exec = Exec;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(prep, prog, povm, 2, h.paths(), opts));
}

}  // namespace

BENCHMARK(BM_FourierSerial)->DenseRange(4, 8, 2);
BENCHMARK(BM_FourierParallel)->DenseRange(4, 8, 2);
BENCHMARK(BM_EvolveAll<Execution::Serial>)->Arg(3)->Arg(4);
BENCHMARK(BM_EvolveAll<Execution::Parallel>)->Arg(3)->Arg(4);
BENCHMARK(BM_RunExperiment<Execution::Serial>)->Arg(3)->Arg(4);
BENCHMARK(BM_RunExperiment<Execution::Parallel>)->Arg(3)->Arg(4);

BENCHMARK_MAIN();
