#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "xrid/rng.hpp"

namespace xrid {

struct MlpConfig {
  int layers = 2;          // hidden layers, [1, 6]
  int layer_size = 64;     // [10, 300]
  double learning_rate = 1e-3;  // [1e-5, 1e-2]
  std::uint64_t seed = 0;

  void validate() const;
};

enum class RnnKind { FRNN, LSTM, GRU };

std::string to_string(RnnKind k);
RnnKind rnn_kind_from_string(const std::string& s);

struct RnnConfig {
  RnnKind kind = RnnKind::LSTM;
  int hidden_size = 64;    // [20, 200]
  int layers = 1;          // [1, 8]
  double dropout = 0.0;    // [0, 0.6]; inter-layer only
  double learning_rate = 1e-3;  // [1e-4, 1e-2]
  std::uint64_t seed = 0;

  void validate() const;
};

struct Tensor {
  std::string name;
  Eigen::MatrixXd value;
};

class ParamStore {
 public:
  Eigen::MatrixXd& add(const std::string& name, Eigen::Index rows,
                       Eigen::Index cols);
  Eigen::MatrixXd& at(const std::string& name);
  const Eigen::MatrixXd& at(const std::string& name) const;

  void set_zero();
  double squared_norm() const;
  void scale(double s);

  std::vector<Tensor> tensors;
};

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);
double mean_cross_entropy(const Eigen::MatrixXd& probs,
                          const std::vector<int>& labels);

/// Batch for either network family: MLP uses `flat` [B x D], recurrent
/// nets use time-major `steps` (T entries of [B x F]).
struct NetBatch {
  Eigen::MatrixXd flat;
  std::vector<Eigen::MatrixXd> steps;
};

class NeuralNet {
 public:
  virtual ~NeuralNet() = default;

  /// Returns logits [B x S]. With `training` set, dropout draws masks from
  /// `dropout_rng` and caches everything backward() needs.
  virtual Eigen::MatrixXd forward(const NetBatch& batch, bool training,
                                  Rng* dropout_rng) = 0;

  /// dlogits is dLoss/dlogits of the batch-mean loss; fills `grads`.
  virtual void backward(const Eigen::MatrixXd& dlogits) = 0;

  virtual bool recurrent() const = 0;

  ParamStore params;
  ParamStore grads;
};

class MlpNet : public NeuralNet {
 public:
  MlpNet(const MlpConfig& cfg, int input_width, int n_classes);

  Eigen::MatrixXd forward(const NetBatch& batch, bool training,
                          Rng* dropout_rng) override;
  void backward(const Eigen::MatrixXd& dlogits) override;
  bool recurrent() const override { return false; }

  MlpConfig config;
  int input_width = 0;
  int n_classes = 0;

 private:
  std::vector<Eigen::MatrixXd> acts_;  // acts_[0] = input
};

class RnnNet : public NeuralNet {
 public:
  RnnNet(const RnnConfig& cfg, int input_width, int n_classes);

  Eigen::MatrixXd forward(const NetBatch& batch, bool training,
                          Rng* dropout_rng) override;
  void backward(const Eigen::MatrixXd& dlogits) override;
  bool recurrent() const override { return true; }

  RnnConfig config;
  int input_width = 0;
  int n_classes = 0;

 private:
  struct LayerCache {
    std::vector<Eigen::MatrixXd> x;       // layer input per t (post-dropout)
    std::vector<Eigen::MatrixXd> h;       // h[0] = zero state, h[t+1] = output
    std::vector<Eigen::MatrixXd> gates;   // kind-specific per-t caches
    std::vector<Eigen::MatrixXd> c;       // LSTM cell state, c[0] = zero
    std::vector<Eigen::MatrixXd> tanh_c;  // LSTM readout cache
    std::vector<Eigen::MatrixXd> hun;     // GRU h_{t-1} * Un cache
    std::vector<Eigen::MatrixXd> dropout_mask;
  };
  void forward_layer(int layer, const std::vector<Eigen::MatrixXd>& input,
                     LayerCache& cache);
  // Returns dx per timestep given dh contributions; accumulates grads.
  std::vector<Eigen::MatrixXd> backward_layer(int layer,
                                              std::vector<Eigen::MatrixXd> dh);

  std::vector<LayerCache> caches_;
  Eigen::MatrixXd top_last_h_;
};

std::unique_ptr<NeuralNet> make_mlp(const MlpConfig& cfg, int input_width,
                                    int n_classes);
std::unique_ptr<NeuralNet> make_rnn(const RnnConfig& cfg, int input_width,
                                    int n_classes);

class Adam {
 public:
  /// beta1 0.9, beta2 0.999, eps 1e-8, bias-corrected.
  explicit Adam(const ParamStore& params);
  void step(ParamStore& params, const ParamStore& grads, double lr);

 private:
  std::vector<Eigen::MatrixXd> m_, v_;
  long t_ = 0;
};

}  // namespace xrid
