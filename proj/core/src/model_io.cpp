#include "xrid/models/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "xrid/error.hpp"
#include "xrid/models/forest.hpp"
#include "xrid/models/train.hpp"
#include "xrid/take_io.hpp"

namespace xrid {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd mat_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw DataError("model file: tensor size mismatch");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  }
  return m;
}

json params_to_json(const ParamStore& store) {
  json out = json::array();
  for (const auto& t : store.tensors) {
    json entry = mat_to_json(t.value);
    entry["name"] = t.name;
    out.push_back(entry);
  }
  return out;
}

void params_from_json(const json& j, ParamStore& store) {
  for (const auto& entry : j) {
    const std::string name = entry.at("name").get<std::string>();
    store.at(name) = mat_from_json(entry);
  }
}

json common_to_json(const Classifier& model) {
  return {{"version", kFormatVersion},
          {"family", model.family()},
          {"classes", model.classes()},
          {"scaler",
           {{"mean", vec_to_json(model.scaler().mean)},
            {"std", vec_to_json(model.scaler().std)}}},
          {"snapshot",
           {{"epoch", model.snapshot().epoch},
            {"val_mean_acc", model.snapshot().val_mean_acc},
            {"val_min_acc", model.snapshot().val_min_acc}}}};
}

void common_from_json(const json& doc, Classifier& model) {
  Scaler scaler;
  scaler.mean = vec_from_json(doc.at("scaler").at("mean"));
  scaler.std = vec_from_json(doc.at("scaler").at("std"));
  ClassifierAccess::init(model,
                         doc.at("classes").get<std::vector<std::string>>(),
                         std::move(scaler));
  Snapshot snap;
  snap.epoch = doc.at("snapshot").at("epoch").get<int>();
  snap.val_mean_acc = doc.at("snapshot").at("val_mean_acc").get<double>();
  snap.val_min_acc = doc.at("snapshot").at("val_min_acc").get<double>();
  ClassifierAccess::set_snapshot(model, snap);
}

json tree_to_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    if (n.feature < 0) {
      nodes.push_back({{"dist", vec_to_json(n.distribution)}});
    } else {
      nodes.push_back({{"f", n.feature},
                       {"t", n.threshold},
                       {"l", n.left},
                       {"r", n.right}});
    }
  }
  return nodes;
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree tree;
  for (const auto& nj : j) {
    TreeNode n;
    if (nj.contains("dist")) {
      n.distribution = vec_from_json(nj.at("dist"));
    } else {
      n.feature = nj.at("f").get<int>();
      n.threshold = nj.at("t").get<double>();
      n.left = nj.at("l").get<int>();
      n.right = nj.at("r").get<int>();
    }
    tree.nodes.push_back(std::move(n));
  }
  return tree;
}

}  // namespace

void save_model(const std::string& path, const Classifier& model) {
  json doc = common_to_json(model);
  const std::string family = model.family();
  if (family == "rf") {
    const auto& rf = dynamic_cast<const RandomForestModel&>(model);
    doc["config"] = {{"n_estimators", rf.config.n_estimators},
                     {"min_samples_leaf", rf.config.min_samples_leaf},
                     {"seed", rf.config.seed}};
    json trees = json::array();
    for (const auto& t : rf.trees) trees.push_back(tree_to_json(t));
    doc["trees"] = std::move(trees);
  } else if (family == "mlp") {
    const auto& mlp = dynamic_cast<const MlpModel&>(model);
    doc["config"] = {{"layers", mlp.config.layers},
                     {"layer_size", mlp.config.layer_size},
                     {"learning_rate", mlp.config.learning_rate},
                     {"seed", mlp.config.seed}};
    doc["input_width"] = mlp.net->input_width;
    doc["params"] = params_to_json(mlp.net->params);
  } else {
    const auto& rnn = dynamic_cast<const RnnModel&>(model);
    doc["config"] = {{"kind", to_string(rnn.config.kind)},
                     {"hidden_size", rnn.config.hidden_size},
                     {"layers", rnn.config.layers},
                     {"dropout", rnn.config.dropout},
                     {"learning_rate", rnn.config.learning_rate},
                     {"seed", rnn.config.seed}};
    doc["input_width"] = rnn.net->input_width;
    doc["params"] = params_to_json(rnn.net->params);
  }
  atomic_write(path, doc.dump() + "\n");
}

std::unique_ptr<Classifier> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path);
  json doc = json::parse(in);
  if (doc.at("version").get<int>() != kFormatVersion) {
    throw DataError("model file: unsupported version");
  }
  const std::string family = doc.at("family").get<std::string>();
  const int n_classes = static_cast<int>(doc.at("classes").size());

  if (family == "rf") {
    auto model = std::make_unique<RandomForestModel>();
    common_from_json(doc, *model);
    model->config.n_estimators = doc.at("config").at("n_estimators").get<int>();
    model->config.min_samples_leaf =
        doc.at("config").at("min_samples_leaf").get<int>();
    model->config.seed = doc.at("config").at("seed").get<std::uint64_t>();
    for (const auto& t : doc.at("trees")) {
      model->trees.push_back(tree_from_json(t));
    }
    return model;
  }
  if (family == "mlp") {
    auto model = std::make_unique<MlpModel>();
    common_from_json(doc, *model);
    model->config.layers = doc.at("config").at("layers").get<int>();
    model->config.layer_size = doc.at("config").at("layer_size").get<int>();
    model->config.learning_rate =
        doc.at("config").at("learning_rate").get<double>();
    model->config.seed = doc.at("config").at("seed").get<std::uint64_t>();
    model->net = std::make_unique<MlpNet>(
        model->config, doc.at("input_width").get<int>(), n_classes);
    params_from_json(doc.at("params"), model->net->params);
    return model;
  }
  auto model = std::make_unique<RnnModel>();
  common_from_json(doc, *model);
  model->config.kind =
      rnn_kind_from_string(doc.at("config").at("kind").get<std::string>());
  model->config.hidden_size = doc.at("config").at("hidden_size").get<int>();
  model->config.layers = doc.at("config").at("layers").get<int>();
  model->config.dropout = doc.at("config").at("dropout").get<double>();
  model->config.learning_rate =
      doc.at("config").at("learning_rate").get<double>();
  model->config.seed = doc.at("config").at("seed").get<std::uint64_t>();
  model->net = std::make_unique<RnnNet>(
      model->config, doc.at("input_width").get<int>(), n_classes);
  params_from_json(doc.at("params"), model->net->params);
  return model;
}

}  // namespace xrid
