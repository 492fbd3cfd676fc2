#include <benchmark/benchmark.h>

#include "xrid/models/net.hpp"
#include "xrid/rng.hpp"

namespace {

using namespace xrid;

NetBatch window_batch(int batch, int steps, int width) {
  Rng rng(3);
  NetBatch b;
  for (int t = 0; t < steps; ++t) {
    b.steps.push_back(Eigen::MatrixXd::NullaryExpr(
        batch, width,
        [&](Eigen::Index, Eigen::Index) { return rng.normal(); }));
  }
  return b;
}

void run_forward_backward(NeuralNet& net, const NetBatch& batch, int batch_n,
                          int classes, benchmark::State& state) {
  for (auto _ : state) {
    const Eigen::MatrixXd logits = net.forward(batch, true, nullptr);
    Eigen::MatrixXd dlogits = softmax_rows(logits);
    for (int i = 0; i < batch_n; ++i) dlogits(i, i % classes) -= 1.0;
    dlogits /= batch_n;
    net.backward(dlogits);
    benchmark::DoNotOptimize(net.grads);
  }
  state.SetItemsProcessed(state.iterations() * batch_n);
}

void BM_LstmStep(benchmark::State& state) {
  RnnConfig cfg;
  cfg.kind = RnnKind::LSTM;
  cfg.hidden_size = static_cast<int>(state.range(0));
  cfg.layers = 1;
  cfg.seed = 1;
  RnnNet net(cfg, 18, 10);
  const NetBatch batch = window_batch(64, 100, 18);
  run_forward_backward(net, batch, 64, 10, state);
}
BENCHMARK(BM_LstmStep)->Arg(20)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_GruStep(benchmark::State& state) {
  RnnConfig cfg;
  cfg.kind = RnnKind::GRU;
  cfg.hidden_size = static_cast<int>(state.range(0));
  cfg.layers = 1;
  cfg.seed = 1;
  RnnNet net(cfg, 18, 10);
  const NetBatch batch = window_batch(64, 100, 18);
  run_forward_backward(net, batch, 64, 10, state);
}
BENCHMARK(BM_GruStep)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_MlpStep(benchmark::State& state) {
  MlpConfig cfg;
  cfg.layers = 3;
  cfg.layer_size = static_cast<int>(state.range(0));
  cfg.seed = 1;
  MlpNet net(cfg, 90, 10);
  NetBatch batch;
  Rng rng(4);
  batch.flat = Eigen::MatrixXd::NullaryExpr(
      256, 90, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
  run_forward_backward(net, batch, 256, 10, state);
}
BENCHMARK(BM_MlpStep)->Arg(64)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace
