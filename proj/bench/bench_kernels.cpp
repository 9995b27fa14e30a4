#include "btq/harness.hpp"
#include "btq/quantization.hpp"

#include <benchmark/benchmark.h>

namespace {

const btq::Experiment& square() {
  static const btq::Experiment ex = btq::prepare_experiment(btq::demo_config("square"));
  return ex;
}

void BM_ToeplitzSerial(benchmark::State& state) {
  const auto& ex = square();
  const auto basis = btq::lattice_points(ex.polytope, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(btq::serial::build_toeplitz(ex.f, basis));
  state.counters["dim_H"] = static_cast<double>(basis.size());
}

void BM_ToeplitzParallel(benchmark::State& state) {
  const auto& ex = square();
  const auto basis = btq::lattice_points(ex.polytope, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(btq::build_toeplitz(ex.f, basis));
  state.counters["dim_H"] = static_cast<double>(basis.size());
}

void BM_ErrorOperatorSerial(benchmark::State& state) {
  const auto& ex = square();
  const auto basis = btq::lattice_points(ex.polytope, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(btq::serial::error_operator(ex.f, ex.g, 1, basis, ex.region));
  }
}

void BM_ErrorOperatorParallel(benchmark::State& state) {
  const auto& ex = square();
  const auto basis = btq::lattice_points(ex.polytope, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(btq::error_operator(ex.f, ex.g, 1, basis, ex.region));
  }
}

}  // namespace

BENCHMARK(BM_ToeplitzSerial)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ToeplitzParallel)->Arg(11)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ErrorOperatorSerial)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ErrorOperatorParallel)->Arg(11)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
