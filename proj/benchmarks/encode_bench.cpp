#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "xrid/encoders.hpp"

namespace {

const xrid::Take& take_10s() {
  static const xrid::Take take = xrid::bench::random_take(1, 900);
  return take;
}

void BM_EncodeSR(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(xrid::encode_sr(take_10s()));
  }
  state.SetItemsProcessed(state.iterations() * 900);
}
BENCHMARK(BM_EncodeSR);

void BM_EncodeBR(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(xrid::encode_br(take_10s()));
  }
  state.SetItemsProcessed(state.iterations() * 900);
}
BENCHMARK(BM_EncodeBR);

void BM_EncodeBRV(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(xrid::encode_brv(take_10s()));
  }
  state.SetItemsProcessed(state.iterations() * 900);
}
BENCHMARK(BM_EncodeBRV);

}  // namespace

BENCHMARK_MAIN();
