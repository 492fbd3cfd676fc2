#include "xrid/models/net.hpp"

#include <cmath>

#include "xrid/error.hpp"

namespace xrid {

void MlpConfig::validate() const {
  if (layers < 1 || layers > 6) {
    throw DataError("mlp layers " + std::to_string(layers) + " outside [1, 6]");
  }
  if (layer_size < 10 || layer_size > 300) {
    throw DataError("mlp layer_size " + std::to_string(layer_size) +
                    " outside [10, 300]");
  }
  if (learning_rate < 1e-5 || learning_rate > 1e-2) {
    throw DataError("mlp learning_rate outside [1e-5, 1e-2]");
  }
}

void RnnConfig::validate() const {
  if (hidden_size < 20 || hidden_size > 200) {
    throw DataError("rnn hidden_size " + std::to_string(hidden_size) +
                    " outside [20, 200]");
  }
  if (layers < 1 || layers > 8) {
    throw DataError("rnn layers " + std::to_string(layers) + " outside [1, 8]");
  }
  if (dropout < 0.0 || dropout > 0.6) {
    throw DataError("rnn dropout outside [0, 0.6]");
  }
  if (learning_rate < 1e-4 || learning_rate > 1e-2) {
    throw DataError("rnn learning_rate outside [1e-4, 1e-2]");
  }
}

std::string to_string(RnnKind k) {
  switch (k) {
    case RnnKind::FRNN:
      return "frnn";
    case RnnKind::LSTM:
      return "lstm";
    case RnnKind::GRU:
      return "gru";
  }
  return "?";
}

RnnKind rnn_kind_from_string(const std::string& s) {
  if (s == "frnn") return RnnKind::FRNN;
  if (s == "lstm") return RnnKind::LSTM;
  if (s == "gru") return RnnKind::GRU;
  throw DataError("unknown rnn kind '" + s + "'");
}

Eigen::MatrixXd& ParamStore::add(const std::string& name, Eigen::Index rows,
                                 Eigen::Index cols) {
  tensors.push_back({name, Eigen::MatrixXd::Zero(rows, cols)});
  return tensors.back().value;
}

Eigen::MatrixXd& ParamStore::at(const std::string& name) {
  for (auto& t : tensors) {
    if (t.name == name) return t.value;
  }
  throw DataError("no tensor named '" + name + "'");
}

const Eigen::MatrixXd& ParamStore::at(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t.value;
  }
  throw DataError("no tensor named '" + name + "'");
}

void ParamStore::set_zero() {
  for (auto& t : tensors) t.value.setZero();
}

double ParamStore::squared_norm() const {
  double s = 0.0;
  for (const auto& t : tensors) s += t.value.squaredNorm();
  return s;
}

void ParamStore::scale(double s) {
  for (auto& t : tensors) t.value *= s;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out = logits;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double m = out.row(r).maxCoeff();
    out.row(r) = (out.row(r).array() - m).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

double mean_cross_entropy(const Eigen::MatrixXd& probs,
                          const std::vector<int>& labels) {
  double loss = 0.0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    loss -= std::log(std::max(probs(r, labels[static_cast<std::size_t>(r)]),
                              1e-300));
  }
  return loss / static_cast<double>(probs.rows());
}

namespace {

// Glorot-style uniform fan scaling.
void glorot_init(Eigen::MatrixXd& w, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      w(r, c) = rng.uniform(-limit, limit);
    }
  }
}

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate,
                             Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  const double keep = 1.0 - rate;
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      m(r, c) = rng.uniform() < keep ? 1.0 / keep : 0.0;
    }
  }
  return m;
}

inline Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& z) {
  return 1.0 / (1.0 + (-z).exp());
}

}  // namespace

// ---------------------------------------------------------------------------
// MLP

MlpNet::MlpNet(const MlpConfig& cfg, int width, int classes)
    : config(cfg), input_width(width), n_classes(classes) {
  Rng rng(derive_seed(cfg.seed, "mlp-init"));
  int in = width;
  for (int l = 0; l < cfg.layers; ++l) {
    auto& w = params.add("w" + std::to_string(l), in, cfg.layer_size);
    glorot_init(w, rng);
    params.add("b" + std::to_string(l), 1, cfg.layer_size);
    in = cfg.layer_size;
  }
  glorot_init(params.add("w_out", in, classes), rng);
  params.add("b_out", 1, classes);
  grads = params;
  grads.set_zero();
}

Eigen::MatrixXd MlpNet::forward(const NetBatch& batch, bool, Rng*) {
  acts_.clear();
  acts_.push_back(batch.flat);
  for (int l = 0; l < config.layers; ++l) {
    const Eigen::MatrixXd z =
        (acts_.back() * params.at("w" + std::to_string(l))).rowwise() +
        params.at("b" + std::to_string(l)).row(0);
    acts_.push_back(z.cwiseMax(0.0));
  }
  return (acts_.back() * params.at("w_out")).rowwise() +
         params.at("b_out").row(0);
}

void MlpNet::backward(const Eigen::MatrixXd& dlogits) {
  grads.set_zero();
  grads.at("w_out") = acts_.back().transpose() * dlogits;
  grads.at("b_out") = dlogits.colwise().sum();
  Eigen::MatrixXd d = dlogits * params.at("w_out").transpose();
  for (int l = config.layers - 1; l >= 0; --l) {
    // ReLU subgradient at 0 is 0.
    const Eigen::MatrixXd dz =
        (acts_[static_cast<std::size_t>(l + 1)].array() > 0.0)
            .cast<double>() *
        d.array();
    grads.at("w" + std::to_string(l)) =
        acts_[static_cast<std::size_t>(l)].transpose() * dz;
    grads.at("b" + std::to_string(l)) = dz.colwise().sum();
    if (l > 0) d = dz * params.at("w" + std::to_string(l)).transpose();
  }
}

// ---------------------------------------------------------------------------
// Recurrent nets

RnnNet::RnnNet(const RnnConfig& cfg, int width, int classes)
    : config(cfg), input_width(width), n_classes(classes) {
  Rng rng(derive_seed(cfg.seed, "rnn-init"));
  const int h = cfg.hidden_size;
  const int gate_mult =
      cfg.kind == RnnKind::LSTM ? 4 : (cfg.kind == RnnKind::GRU ? 3 : 1);
  int in = width;
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string suffix = std::to_string(l);
    glorot_init(params.add("wx" + suffix, in, gate_mult * h), rng);
    glorot_init(params.add("wh" + suffix, h, gate_mult * h), rng);
    auto& b = params.add("b" + suffix, 1, gate_mult * h);
    if (cfg.kind == RnnKind::LSTM) {
      b.block(0, h, 1, h).setConstant(1.0);  // forget-gate bias
    }
    in = h;
  }
  glorot_init(params.add("w_out", h, classes), rng);
  params.add("b_out", 1, classes);
  grads = params;
  grads.set_zero();
}

void RnnNet::forward_layer(int layer,
                           const std::vector<Eigen::MatrixXd>& input,
                           LayerCache& cache) {
  const std::string suffix = std::to_string(layer);
  const Eigen::MatrixXd& wx = params.at("wx" + suffix);
  const Eigen::MatrixXd& wh = params.at("wh" + suffix);
  const Eigen::RowVectorXd b = params.at("b" + suffix).row(0);
  const int h = config.hidden_size;
  const auto T = input.size();
  const Eigen::Index B = input[0].rows();

  cache.x = input;
  cache.h.assign(1, Eigen::MatrixXd::Zero(B, h));
  cache.gates.clear();
  cache.c.assign(1, Eigen::MatrixXd::Zero(B, h));
  cache.tanh_c.clear();
  cache.hun.clear();

  for (std::size_t t = 0; t < T; ++t) {
    const Eigen::MatrixXd& x = cache.x[t];
    const Eigen::MatrixXd& h_prev = cache.h.back();
    switch (config.kind) {
      case RnnKind::FRNN: {
        Eigen::MatrixXd z = ((x * wx + h_prev * wh).rowwise() + b);
        cache.h.push_back(z.array().tanh().matrix());
        break;
      }
      case RnnKind::LSTM: {
        const Eigen::MatrixXd z = (x * wx + h_prev * wh).rowwise() + b;
        Eigen::MatrixXd gates(B, 4 * h);
        gates.leftCols(h) = sigmoid(z.leftCols(h).array());
        gates.middleCols(h, h) = sigmoid(z.middleCols(h, h).array());
        gates.middleCols(2 * h, h) = z.middleCols(2 * h, h).array().tanh();
        gates.rightCols(h) = sigmoid(z.rightCols(h).array());
        const auto i = gates.leftCols(h).array();
        const auto f = gates.middleCols(h, h).array();
        const auto g = gates.middleCols(2 * h, h).array();
        const auto o = gates.rightCols(h).array();
        Eigen::MatrixXd c =
            (f * cache.c.back().array() + i * g).matrix();
        Eigen::MatrixXd tc = c.array().tanh().matrix();
        cache.h.push_back((o * tc.array()).matrix());
        cache.c.push_back(std::move(c));
        cache.tanh_c.push_back(std::move(tc));
        cache.gates.push_back(std::move(gates));
        break;
      }
      case RnnKind::GRU: {
        const Eigen::MatrixXd zx = (x * wx).rowwise() + b;
        const Eigen::MatrixXd zh = h_prev * wh;
        Eigen::MatrixXd gates(B, 3 * h);
        gates.leftCols(h) =
            sigmoid(zx.leftCols(h).array() + zh.leftCols(h).array());  // r
        gates.middleCols(h, h) = sigmoid(zx.middleCols(h, h).array() +
                                         zh.middleCols(h, h).array());  // z
        Eigen::MatrixXd hun = zh.rightCols(h);  // h_{t-1} * Un
        gates.rightCols(h) = (zx.rightCols(h).array() +
                              gates.leftCols(h).array() * hun.array())
                                 .tanh();  // n
        const auto r = gates.leftCols(h).array();
        const auto zg = gates.middleCols(h, h).array();
        const auto n = gates.rightCols(h).array();
        cache.h.push_back(
            ((1.0 - zg) * n + zg * h_prev.array()).matrix());
        cache.hun.push_back(std::move(hun));
        cache.gates.push_back(std::move(gates));
        break;
      }
    }
  }
}

Eigen::MatrixXd RnnNet::forward(const NetBatch& batch, bool training,
                                Rng* dropout_rng) {
  if (batch.steps.empty()) throw DataError("rnn forward: empty window");
  caches_.assign(static_cast<std::size_t>(config.layers), LayerCache{});

  const std::vector<Eigen::MatrixXd>* input = &batch.steps;
  std::vector<Eigen::MatrixXd> dropped;
  for (int l = 0; l < config.layers; ++l) {
    LayerCache& cache = caches_[static_cast<std::size_t>(l)];
    forward_layer(l, *input, cache);

    if (l + 1 < config.layers) {
      dropped.clear();
      const bool use_dropout =
          training && config.dropout > 0.0 && dropout_rng != nullptr;
      cache.dropout_mask.clear();
      for (std::size_t t = 1; t < cache.h.size(); ++t) {
        if (use_dropout) {
          cache.dropout_mask.push_back(dropout_mask(
              cache.h[t].rows(), cache.h[t].cols(), config.dropout,
              *dropout_rng));
          dropped.push_back(
              cache.h[t].cwiseProduct(cache.dropout_mask.back()));
        } else {
          dropped.push_back(cache.h[t]);
        }
      }
      // forward_layer copies its input into cache.x, so reusing `dropped`
      // across iterations is safe.
      input = &dropped;
    }
  }

  const LayerCache& top = caches_.back();
  top_last_h_ = top.h.back();
  return (top_last_h_ * params.at("w_out")).rowwise() +
         params.at("b_out").row(0);
}

std::vector<Eigen::MatrixXd> RnnNet::backward_layer(
    int layer, std::vector<Eigen::MatrixXd> dh_out) {
  const std::string suffix = std::to_string(layer);
  const Eigen::MatrixXd& wx = params.at("wx" + suffix);
  const Eigen::MatrixXd& wh = params.at("wh" + suffix);
  Eigen::MatrixXd& gwx = grads.at("wx" + suffix);
  Eigen::MatrixXd& gwh = grads.at("wh" + suffix);
  Eigen::MatrixXd& gb = grads.at("b" + suffix);
  LayerCache& cache = caches_[static_cast<std::size_t>(layer)];

  const int h = config.hidden_size;
  const auto T = cache.x.size();
  const Eigen::Index B = cache.x[0].rows();

  std::vector<Eigen::MatrixXd> dx(T);
  Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(B, h);
  Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(B, h);

  for (std::size_t ti = T; ti-- > 0;) {
    const Eigen::MatrixXd dh = dh_out[ti] + dh_next;
    switch (config.kind) {
      case RnnKind::FRNN: {
        const auto& ht = cache.h[ti + 1];
        const Eigen::MatrixXd dz =
            (dh.array() * (1.0 - ht.array().square())).matrix();
        gwx += cache.x[ti].transpose() * dz;
        gwh += cache.h[ti].transpose() * dz;
        gb += dz.colwise().sum();
        dx[ti] = dz * wx.transpose();
        dh_next = dz * wh.transpose();
        break;
      }
      case RnnKind::LSTM: {
        const auto& gates = cache.gates[ti];
        const auto i = gates.leftCols(h).array();
        const auto f = gates.middleCols(h, h).array();
        const auto g = gates.middleCols(2 * h, h).array();
        const auto o = gates.rightCols(h).array();
        const auto tc = cache.tanh_c[ti].array();
        const auto c_prev = cache.c[ti].array();

        const Eigen::ArrayXXd dc =
            dh.array() * o * (1.0 - tc.square()) + dc_next.array();
        Eigen::MatrixXd dz(B, 4 * h);
        dz.leftCols(h) = (dc * g) * i * (1.0 - i);                // d pre-i
        dz.middleCols(h, h) = (dc * c_prev) * f * (1.0 - f);     // d pre-f
        dz.middleCols(2 * h, h) = (dc * i) * (1.0 - g.square()); // d pre-g
        dz.rightCols(h) = (dh.array() * tc) * o * (1.0 - o);     // d pre-o

        gwx += cache.x[ti].transpose() * dz;
        gwh += cache.h[ti].transpose() * dz;
        gb += dz.colwise().sum();
        dx[ti] = dz * wx.transpose();
        dh_next = dz * wh.transpose();
        dc_next = (dc * f).matrix();
        break;
      }
      case RnnKind::GRU: {
        const auto& gates = cache.gates[ti];
        const auto r = gates.leftCols(h).array();
        const auto z = gates.middleCols(h, h).array();
        const auto n = gates.rightCols(h).array();
        const auto h_prev = cache.h[ti].array();
        const auto hun = cache.hun[ti].array();

        const Eigen::ArrayXXd dz_gate = dh.array() * (h_prev - n);
        const Eigen::ArrayXXd dn = dh.array() * (1.0 - z);
        Eigen::ArrayXXd dh_prev = dh.array() * z;

        const Eigen::ArrayXXd dpre_n = dn * (1.0 - n.square());
        const Eigen::ArrayXXd dr = dpre_n * hun;
        const Eigen::ArrayXXd dpre_r = dr * r * (1.0 - r);
        const Eigen::ArrayXXd dpre_z = dz_gate * z * (1.0 - z);

        Eigen::MatrixXd dzx(B, 3 * h);
        dzx.leftCols(h) = dpre_r.matrix();
        dzx.middleCols(h, h) = dpre_z.matrix();
        dzx.rightCols(h) = dpre_n.matrix();

        gwx += cache.x[ti].transpose() * dzx;
        gb += dzx.colwise().sum();
        dx[ti] = dzx * wx.transpose();

        // Recurrent weights: r/z blocks act on h_prev directly, the n block
        // contributes through r ∘ (h_prev Un).
        Eigen::MatrixXd dzh(B, 3 * h);
        dzh.leftCols(h) = dpre_r.matrix();
        dzh.middleCols(h, h) = dpre_z.matrix();
        dzh.rightCols(h) = (dpre_n * r).matrix();
        gwh += cache.h[ti].transpose() * dzh;
        dh_prev += (dzh * wh.transpose()).array();
        dh_next = dh_prev.matrix();
        break;
      }
    }
  }
  return dx;
}

void RnnNet::backward(const Eigen::MatrixXd& dlogits) {
  grads.set_zero();
  grads.at("w_out") = top_last_h_.transpose() * dlogits;
  grads.at("b_out") = dlogits.colwise().sum();

  const auto T = caches_.back().x.size();
  const Eigen::Index B = dlogits.rows();
  const int h = config.hidden_size;

  std::vector<Eigen::MatrixXd> dh(
      T, Eigen::MatrixXd::Zero(B, h));
  dh.back() = dlogits * params.at("w_out").transpose();

  for (int l = config.layers - 1; l >= 0; --l) {
    std::vector<Eigen::MatrixXd> dx = backward_layer(l, std::move(dh));
    if (l > 0) {
      LayerCache& below = caches_[static_cast<std::size_t>(l - 1)];
      dh = std::move(dx);
      if (!below.dropout_mask.empty()) {
        for (std::size_t t = 0; t < dh.size(); ++t) {
          dh[t] = dh[t].cwiseProduct(below.dropout_mask[t]);
        }
      }
    }
  }
}

std::unique_ptr<NeuralNet> make_mlp(const MlpConfig& cfg, int input_width,
                                    int n_classes) {
  return std::make_unique<MlpNet>(cfg, input_width, n_classes);
}

std::unique_ptr<NeuralNet> make_rnn(const RnnConfig& cfg, int input_width,
                                    int n_classes) {
  return std::make_unique<RnnNet>(cfg, input_width, n_classes);
}

// ---------------------------------------------------------------------------
// Adam

Adam::Adam(const ParamStore& params) {
  for (const auto& t : params.tensors) {
    m_.push_back(Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols()));
    v_.push_back(Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols()));
  }
}

void Adam::step(ParamStore& params, const ParamStore& grads, double lr) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    const Eigen::MatrixXd& g = grads.tensors[i].value;
    m_[i] = beta1 * m_[i] + (1.0 - beta1) * g;
    v_[i] = beta2 * v_[i].array().matrix() +
            (1.0 - beta2) * g.cwiseProduct(g);
    const Eigen::ArrayXXd m_hat = m_[i].array() / bc1;
    const Eigen::ArrayXXd v_hat = v_[i].array() / bc2;
    params.tensors[i].value.array() -= lr * m_hat / (v_hat.sqrt() + eps);
  }
}

}  // namespace xrid
