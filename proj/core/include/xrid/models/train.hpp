#pragma once

#include <memory>

#include "xrid/models/classifier.hpp"
#include "xrid/models/net.hpp"

namespace xrid {

struct TrainConfig {
  int max_epochs = 300;
  int batch_size = 256;
  int grace_epochs = 20;
  double divergence_factor = 2.0;
  double clip_norm = 5.0;  // global-norm gradient clip, recurrent nets only
  std::uint64_t seed = 0;
  bool verbose = false;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_mean_acc = 0.0;
  double val_min_acc = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> log;
  Snapshot best;
};

/// Training batches for either network family; binned data in `x` rows,
/// windowed data in `windows`.
struct NetDataset {
  Eigen::MatrixXd x;
  std::vector<Eigen::MatrixXd> windows;
  std::vector<int> labels;
  bool windowed = false;

  std::size_t size() const {
    return windowed ? windows.size() : static_cast<std::size_t>(x.rows());
  }
};

/// Mini-batch Adam with seeded shuffling, per-epoch validation macro
/// accuracy, best-epoch snapshotting and divergence early stop. Leaves
/// `net.params` at the snapshot. Throws DivergenceError when the loss is
/// non-finite at epoch 1.
TrainResult train_net(NeuralNet& net, double learning_rate,
                      const NetDataset& train, const NetDataset& val,
                      int n_classes, const TrainConfig& cfg);

class MlpModel : public Classifier {
 public:
  std::string family() const override { return "mlp"; }
  SampleMode sample_mode() const override { return SampleMode::Binned; }
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const override;

  MlpConfig config;
  std::unique_ptr<MlpNet> net;
  TrainResult history;
};

class RnnModel : public Classifier {
 public:
  std::string family() const override { return to_string(config.kind); }
  SampleMode sample_mode() const override { return SampleMode::Windowed; }
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const override;

  RnnConfig config;
  std::unique_ptr<RnnNet> net;
  TrainResult history;
};

std::unique_ptr<MlpModel> mlp_fit(const std::vector<BinnedSample>& train,
                                  const std::vector<BinnedSample>& val,
                                  const std::vector<std::string>& classes,
                                  const MlpConfig& cfg,
                                  const TrainConfig& train_cfg);

std::unique_ptr<RnnModel> rnn_fit(const std::vector<WindowedSample>& train,
                                  const std::vector<WindowedSample>& val,
                                  const std::vector<std::string>& classes,
                                  const RnnConfig& cfg,
                                  const TrainConfig& train_cfg);

}  // namespace xrid
