#include "xrid/models/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "xrid/error.hpp"

namespace xrid {

namespace {

NetBatch gather_batch(const NetDataset& ds, const std::vector<int>& order,
                      std::size_t begin, std::size_t end) {
  NetBatch batch;
  const auto b = static_cast<Eigen::Index>(end - begin);
  if (!ds.windowed) {
    batch.flat.resize(b, ds.x.cols());
    for (std::size_t i = begin; i < end; ++i) {
      batch.flat.row(static_cast<Eigen::Index>(i - begin)) =
          ds.x.row(order[i]);
    }
  } else {
    const auto& first = ds.windows.front();
    const auto T = first.rows();
    batch.steps.assign(static_cast<std::size_t>(T),
                       Eigen::MatrixXd(b, first.cols()));
    for (std::size_t i = begin; i < end; ++i) {
      const auto& w = ds.windows[static_cast<std::size_t>(order[i])];
      for (Eigen::Index t = 0; t < T; ++t) {
        batch.steps[static_cast<std::size_t>(t)].row(
            static_cast<Eigen::Index>(i - begin)) = w.row(t);
      }
    }
  }
  return batch;
}

std::vector<int> batch_labels(const NetDataset& ds,
                              const std::vector<int>& order,
                              std::size_t begin, std::size_t end) {
  std::vector<int> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    out.push_back(ds.labels[static_cast<std::size_t>(order[i])]);
  }
  return out;
}

struct ValScore {
  double mean_acc = 0.0;
  double min_acc = 0.0;
};

ValScore validate(NeuralNet& net, const NetDataset& val, int n_classes,
                  int batch_size) {
  std::vector<double> correct(static_cast<std::size_t>(n_classes), 0.0);
  std::vector<double> total(static_cast<std::size_t>(n_classes), 0.0);
  std::vector<int> order(val.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t begin = 0; begin < val.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(val.size(), begin + static_cast<std::size_t>(batch_size));
    const NetBatch batch = gather_batch(val, order, begin, end);
    const Eigen::MatrixXd logits = net.forward(batch, false, nullptr);
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      Eigen::Index pred = 0;
      logits.row(r).maxCoeff(&pred);
      const int label = val.labels[begin + static_cast<std::size_t>(r)];
      total[static_cast<std::size_t>(label)] += 1.0;
      if (static_cast<int>(pred) == label) {
        correct[static_cast<std::size_t>(label)] += 1.0;
      }
    }
  }
  ValScore score;
  score.min_acc = 1.0;
  int present = 0;
  for (int c = 0; c < n_classes; ++c) {
    if (total[static_cast<std::size_t>(c)] == 0.0) continue;
    const double acc = correct[static_cast<std::size_t>(c)] /
                       total[static_cast<std::size_t>(c)];
    score.mean_acc += acc;
    score.min_acc = std::min(score.min_acc, acc);
    ++present;
  }
  score.mean_acc = present > 0 ? score.mean_acc / present : 0.0;
  if (present == 0) score.min_acc = 0.0;
  return score;
}

void clip_global_norm(ParamStore& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > max_norm) grads.scale(max_norm / norm);
}

}  // namespace

TrainResult train_net(NeuralNet& net, double learning_rate,
                      const NetDataset& train, const NetDataset& val,
                      int n_classes, const TrainConfig& cfg) {
  if (cfg.max_epochs < 1) throw DataError("max_epochs must be >= 1");
  if (cfg.batch_size < 1) throw DataError("batch_size must be >= 1");
  if (train.size() == 0) throw DataError("empty training set");

  Adam opt(net.params);
  Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));
  Rng dropout_rng(derive_seed(cfg.seed, "dropout"));

  TrainResult result;
  ParamStore best_params = net.params;
  double best_metric = -1.0;
  double best_train_loss = std::numeric_limits<double>::infinity();

  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    // Fisher-Yates with the seeded stream.
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(
          shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t begin = 0; begin < train.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(
          train.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      const NetBatch batch = gather_batch(train, order, begin, end);
      const std::vector<int> labels = batch_labels(train, order, begin, end);

      const Eigen::MatrixXd logits = net.forward(batch, true, &dropout_rng);
      const Eigen::MatrixXd probs = softmax_rows(logits);
      epoch_loss += mean_cross_entropy(probs, labels);
      ++n_batches;

      Eigen::MatrixXd dlogits = probs;
      for (Eigen::Index r = 0; r < dlogits.rows(); ++r) {
        dlogits(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
      }
      dlogits /= static_cast<double>(dlogits.rows());

      net.backward(dlogits);
      if (net.recurrent()) clip_global_norm(net.grads, cfg.clip_norm);
      opt.step(net.params, net.grads, learning_rate);
    }
    epoch_loss /= static_cast<double>(n_batches);

    if (!std::isfinite(epoch_loss)) {
      if (epoch == 1) throw DivergenceError("diverged immediately");
      break;
    }

    const ValScore score = validate(net, val, n_classes, cfg.batch_size);
    result.log.push_back({epoch, epoch_loss, score.mean_acc, score.min_acc});
    if (cfg.verbose) {
      std::fprintf(stderr,
                   "epoch %3d  loss %.4f  val mean %.3f  val min %.3f\n",
                   epoch, epoch_loss, score.mean_acc, score.min_acc);
    }

    // Snapshot at the validation highpoint (macro accuracy).
    if (score.mean_acc > best_metric) {
      best_metric = score.mean_acc;
      best_params = net.params;
      result.best = {epoch, score.mean_acc, score.min_acc};
    }

    best_train_loss = std::min(best_train_loss, epoch_loss);
    if (epoch > cfg.grace_epochs &&
        epoch_loss > cfg.divergence_factor * best_train_loss) {
      break;
    }
  }

  net.params = best_params;
  return result;
}

Eigen::VectorXd MlpModel::predict_proba(const Eigen::MatrixXd& x) const {
  NetBatch batch;
  batch.flat = scaler_.transform(Eigen::VectorXd(x.reshaped().eval()))
                   .transpose();
  const Eigen::MatrixXd logits =
      const_cast<MlpNet&>(*net).forward(batch, false, nullptr);
  return softmax_rows(logits).row(0).transpose();
}

Eigen::VectorXd RnnModel::predict_proba(const Eigen::MatrixXd& x) const {
  NetBatch batch;
  const Eigen::MatrixXd scaled = scaler_.transform(x);
  batch.steps.reserve(static_cast<std::size_t>(scaled.rows()));
  for (Eigen::Index t = 0; t < scaled.rows(); ++t) {
    batch.steps.push_back(scaled.row(t));
  }
  const Eigen::MatrixXd logits =
      const_cast<RnnNet&>(*net).forward(batch, false, nullptr);
  return softmax_rows(logits).row(0).transpose();
}

namespace {

template <typename Model, typename Net, typename Config, typename SampleT,
          typename MakeDs>
std::unique_ptr<Model> fit_impl(const std::vector<SampleT>& train,
                                const std::vector<SampleT>& val,
                                const std::vector<std::string>& classes,
                                const Config& cfg, const TrainConfig& tcfg,
                                int input_width, const MakeDs& make_ds) {
  auto model = std::make_unique<Model>();
  model->config = cfg;
  ClassifierAccess::init(*model, classes, fit_scaler(train));

  const NetDataset train_ds =
      make_ds(apply_scaler(model->scaler(), train), *model);
  const NetDataset val_ds = make_ds(apply_scaler(model->scaler(), val), *model);

  model->net = std::make_unique<Net>(cfg, input_width,
                                     static_cast<int>(classes.size()));
  model->history = train_net(*model->net, cfg.learning_rate, train_ds, val_ds,
                             static_cast<int>(classes.size()), tcfg);
  ClassifierAccess::set_snapshot(*model, model->history.best);
  return model;
}

}  // namespace

std::unique_ptr<MlpModel> mlp_fit(const std::vector<BinnedSample>& train,
                                  const std::vector<BinnedSample>& val,
                                  const std::vector<std::string>& classes,
                                  const MlpConfig& cfg,
                                  const TrainConfig& train_cfg) {
  cfg.validate();
  if (train.empty()) throw DataError("mlp_fit: empty training set");
  const int width = static_cast<int>(train.front().values.size());
  auto make_ds = [](const std::vector<BinnedSample>& samples,
                    const Classifier& model) {
    NetDataset ds;
    ds.windowed = false;
    ds.x.resize(static_cast<Eigen::Index>(samples.size()),
                samples.front().values.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      ds.x.row(static_cast<Eigen::Index>(i)) = samples[i].values;
      ds.labels.push_back(model.class_index(samples[i].subject_id));
    }
    return ds;
  };
  return fit_impl<MlpModel, MlpNet>(train, val, classes, cfg, train_cfg,
                                    width, make_ds);
}

std::unique_ptr<RnnModel> rnn_fit(const std::vector<WindowedSample>& train,
                                  const std::vector<WindowedSample>& val,
                                  const std::vector<std::string>& classes,
                                  const RnnConfig& cfg,
                                  const TrainConfig& train_cfg) {
  cfg.validate();
  if (train.empty()) throw DataError("rnn_fit: empty training set");
  const int width = static_cast<int>(train.front().values.cols());
  auto make_ds = [](const std::vector<WindowedSample>& samples,
                    const Classifier& model) {
    NetDataset ds;
    ds.windowed = true;
    for (const auto& s : samples) {
      ds.windows.push_back(s.values);
      ds.labels.push_back(model.class_index(s.subject_id));
    }
    return ds;
  };
  return fit_impl<RnnModel, RnnNet>(train, val, classes, cfg, train_cfg,
                                    width, make_ds);
}

}  // namespace xrid
