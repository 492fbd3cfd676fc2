#include "xrid/models/forest.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <numeric>

#include "xrid/error.hpp"

namespace xrid {

void RfConfig::validate() const {
  if (n_estimators < 50 || n_estimators > 1000) {
    throw DataError("rf n_estimators " + std::to_string(n_estimators) +
                    " outside [50, 1000]");
  }
  if (min_samples_leaf < 1 || min_samples_leaf > 1000) {
    throw DataError("rf min_samples_leaf " + std::to_string(min_samples_leaf) +
                    " outside [1, 1000]");
  }
}

const Eigen::VectorXd& DecisionTree::predict(const Eigen::VectorXd& x) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    i = x(n.feature) <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].distribution;
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

double gini_from_counts(const Eigen::VectorXd& counts, double n) {
  if (n <= 0.0) return 0.0;
  return 1.0 - counts.squaredNorm() / (n * n);
}

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const std::vector<int>& y,
              int n_classes, int min_samples_leaf, int max_features, Rng& rng)
      : x_(x),
        y_(y),
        n_classes_(n_classes),
        min_leaf_(min_samples_leaf),
        max_features_(max_features),
        rng_(rng) {}

  DecisionTree build(std::vector<int> indices) {
    DecisionTree tree;
    grow(tree, std::move(indices));
    return tree;
  }

 private:
  int grow(DecisionTree& tree, std::vector<int> indices) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_classes_);
    for (int i : indices) counts(y_[static_cast<std::size_t>(i)]) += 1.0;
    const double n = static_cast<double>(indices.size());

    const bool pure = counts.maxCoeff() == n;
    if (pure || n < 2.0 * min_leaf_) {
      make_leaf(tree.nodes[static_cast<std::size_t>(node_id)], counts, n);
      return node_id;
    }

    const SplitChoice best = find_split(indices);
    if (best.feature < 0) {
      make_leaf(tree.nodes[static_cast<std::size_t>(node_id)], counts, n);
      return node_id;
    }

    std::vector<int> left, right;
    for (int i : indices) {
      (x_(i, best.feature) <= best.threshold ? left : right).push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();

    const int l = grow(tree, std::move(left));
    const int r = grow(tree, std::move(right));
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }

  void make_leaf(TreeNode& node, const Eigen::VectorXd& counts, double n) {
    node.feature = -1;
    node.distribution = counts / std::max(1.0, n);
  }

  SplitChoice find_split(const std::vector<int>& indices) {
    const int width = static_cast<int>(x_.cols());
    // Partial Fisher-Yates for the per-node feature subset.
    std::vector<int> features(static_cast<std::size_t>(width));
    std::iota(features.begin(), features.end(), 0);
    const int k = std::min(max_features_, width);
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(
          rng_.uniform_int(i, width - 1));
      std::swap(features[static_cast<std::size_t>(i)], features[j]);
    }

    SplitChoice best;
    std::vector<std::pair<double, int>> sorted;  // (value, class)
    Eigen::VectorXd left_counts(n_classes_), right_counts(n_classes_);
    for (int fi = 0; fi < k; ++fi) {
      const int f = features[static_cast<std::size_t>(fi)];
      sorted.clear();
      for (int i : indices) {
        sorted.emplace_back(x_(i, f), y_[static_cast<std::size_t>(i)]);
      }
      std::sort(sorted.begin(), sorted.end());

      left_counts.setZero();
      right_counts.setZero();
      for (const auto& [v, c] : sorted) right_counts(c) += 1.0;
      const double n = static_cast<double>(sorted.size());

      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        left_counts(sorted[i].second) += 1.0;
        right_counts(sorted[i].second) -= 1.0;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        if (nl < min_leaf_ || nr < min_leaf_) continue;
        const double impurity = (nl * gini_from_counts(left_counts, nl) +
                                 nr * gini_from_counts(right_counts, nr)) /
                                n;
        if (impurity < best.impurity) {
          best.impurity = impurity;
          best.feature = f;
          best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const std::vector<int>& y_;
  const int n_classes_;
  const double min_leaf_;
  const int max_features_;
  Rng& rng_;
};

}  // namespace

DecisionTree tree_fit(const Eigen::MatrixXd& x, const std::vector<int>& y,
                      int n_classes, int min_samples_leaf, int max_features,
                      Rng& rng) {
  if (x.rows() == 0) throw DataError("tree_fit: no samples");
  std::vector<int> indices(static_cast<std::size_t>(x.rows()));
  std::iota(indices.begin(), indices.end(), 0);
  TreeBuilder builder(x, y, n_classes, min_samples_leaf, max_features, rng);
  return builder.build(std::move(indices));
}

Eigen::VectorXd RandomForestModel::predict_proba(
    const Eigen::MatrixXd& x) const {
  const Eigen::VectorXd scaled =
      scaler_.transform(Eigen::VectorXd(x.reshaped().eval()));
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(num_classes());
  for (const auto& tree : trees) acc += tree.predict(scaled);
  return acc / static_cast<double>(trees.size());
}

std::unique_ptr<RandomForestModel> rf_fit(
    const std::vector<BinnedSample>& train,
    const std::vector<std::string>& classes, const RfConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw DataError("rf_fit: empty training set");

  auto model = std::make_unique<RandomForestModel>();
  model->config = cfg;
  ClassifierAccess::init(*model, classes, fit_scaler(train));

  const int n = static_cast<int>(train.size());
  const auto d = train.front().values.size();
  Eigen::MatrixXd x(n, d);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x.row(i) = model->scaler().transform(train[static_cast<std::size_t>(i)].values);
    y[static_cast<std::size_t>(i)] =
        model->class_index(train[static_cast<std::size_t>(i)].subject_id);
  }

  const int max_features = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(d))));
  const int n_classes = static_cast<int>(classes.size());

  model->trees.resize(static_cast<std::size_t>(cfg.n_estimators));
  auto fit_tree = [&](int t) {
    Rng rng(derive_seed(cfg.seed, "tree", static_cast<std::uint64_t>(t)));
    // Bootstrap: n draws with replacement.
    Eigen::MatrixXd xb(n, d);
    std::vector<int> yb(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto j = static_cast<int>(rng.uniform_int(0, n - 1));
      xb.row(i) = x.row(j);
      yb[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(j)];
    }
    model->trees[static_cast<std::size_t>(t)] =
        tree_fit(xb, yb, n_classes, cfg.min_samples_leaf, max_features, rng);
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (int t = 0; t < cfg.n_estimators; ++t) fit_tree(t);
  } else {
    std::vector<std::future<void>> futures;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w) {
      futures.push_back(std::async(std::launch::async, [&] {
        for (int t = next.fetch_add(1); t < cfg.n_estimators;
             t = next.fetch_add(1)) {
          fit_tree(t);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }
  return model;
}

}  // namespace xrid
