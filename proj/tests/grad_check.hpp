#pragma once

// Central-finite-difference gradient verification shared by the unit tests
// and the acceptance suite.

#include <cmath>
#include <vector>

#include "xrid/models/net.hpp"
#include "xrid/rng.hpp"

namespace xrid::testing {

inline double loss_of(NeuralNet& net, const NetBatch& batch,
                      const std::vector<int>& labels) {
  const Eigen::MatrixXd logits = net.forward(batch, false, nullptr);
  return mean_cross_entropy(softmax_rows(logits), labels);
}

// Runs one backward pass and compares every parameter gradient against
// central differences. Returns the maximum relative error, with the
// denominator floored to sidestep near-zero gradients.
inline double max_grad_rel_error(NeuralNet& net, const NetBatch& batch,
                                 const std::vector<int>& labels,
                                 double eps = 1e-5) {
  Eigen::MatrixXd logits = net.forward(batch, true, nullptr);
  Eigen::MatrixXd probs = softmax_rows(logits);
  const auto batch_size = static_cast<double>(labels.size());
  Eigen::MatrixXd dlogits = probs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    dlogits(static_cast<Eigen::Index>(i), labels[i]) -= 1.0;
  }
  dlogits /= batch_size;
  net.backward(dlogits);

  double worst = 0.0;
  for (std::size_t t = 0; t < net.params.tensors.size(); ++t) {
    Eigen::MatrixXd& p = net.params.tensors[t].value;
    const Eigen::MatrixXd& g = net.grads.tensors[t].value;
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) {
        const double saved = p(r, c);
        p(r, c) = saved + eps;
        const double up = loss_of(net, batch, labels);
        p(r, c) = saved - eps;
        const double down = loss_of(net, batch, labels);
        p(r, c) = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double denom =
            std::max({std::abs(numeric), std::abs(g(r, c)), 1e-6});
        worst = std::max(worst, std::abs(numeric - g(r, c)) / denom);
      }
    }
  }
  return worst;
}

inline NetBatch random_flat_batch(Rng& rng, int batch, int width) {
  NetBatch b;
  b.flat = Eigen::MatrixXd::NullaryExpr(
      batch, width, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
  return b;
}

inline NetBatch random_window_batch(Rng& rng, int batch, int steps,
                                    int width) {
  NetBatch b;
  for (int t = 0; t < steps; ++t) {
    b.steps.push_back(Eigen::MatrixXd::NullaryExpr(
        batch, width,
        [&](Eigen::Index, Eigen::Index) { return rng.normal(); }));
  }
  return b;
}

inline std::vector<int> random_labels(Rng& rng, int batch, int classes) {
  std::vector<int> y(static_cast<std::size_t>(batch));
  for (auto& v : y) {
    v = static_cast<int>(rng.uniform_int(0, classes - 1));
  }
  return y;
}

}  // namespace xrid::testing
