#pragma once

#include <cstdint>
#include <memory>

#include "xrid/models/classifier.hpp"
#include "xrid/rng.hpp"

namespace xrid {

struct RfConfig {
  int n_estimators = 100;      // [50, 1000] in the search space
  int min_samples_leaf = 1;    // [1, 1000]
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;  // throws DataError on out-of-range values
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Eigen::VectorXd distribution;  // class frequencies at leaves
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  const Eigen::VectorXd& predict(const Eigen::VectorXd& x) const;
};

/// CART with Gini-impurity splits over a per-node random feature subset of
/// `max_features` (pass the full width for exhaustive search). Thresholds
/// sit at midpoints between consecutive sorted unique values; a split must
/// leave >= min_samples_leaf samples in both children.
DecisionTree tree_fit(const Eigen::MatrixXd& x, const std::vector<int>& y,
                      int n_classes, int min_samples_leaf, int max_features,
                      Rng& rng);

class RandomForestModel : public Classifier {
 public:
  std::string family() const override { return "rf"; }
  SampleMode sample_mode() const override { return SampleMode::Binned; }
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const override;

  RfConfig config;
  std::vector<DecisionTree> trees;
};

/// Bootstrap-aggregated trees; per-tree RNG streams derive from the forest
/// seed so results do not depend on `jobs`. Features are scaled with a
/// scaler fitted on `train`.
std::unique_ptr<RandomForestModel> rf_fit(
    const std::vector<BinnedSample>& train,
    const std::vector<std::string>& classes, const RfConfig& cfg);

}  // namespace xrid
