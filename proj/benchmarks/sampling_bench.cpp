#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "xrid/encoders.hpp"
#include "xrid/sampling.hpp"

namespace {

const xrid::FeatureSequence& features_2min() {
  static const xrid::FeatureSequence seq =
      xrid::encode_br(xrid::bench::random_take(2, 90 * 120));
  return seq;
}

void BM_MakeBinned(benchmark::State& state) {
  const int fpb = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(xrid::make_binned(features_2min(), fpb));
  }
}
BENCHMARK(BM_MakeBinned)->Arg(90)->Arg(450)->Arg(1350);

void BM_MakeWindows(benchmark::State& state) {
  const int window = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        xrid::make_windows(features_2min(), 30.0, window, window));
  }
}
BENCHMARK(BM_MakeWindows)->Arg(10)->Arg(100)->Arg(300);

}  // namespace
