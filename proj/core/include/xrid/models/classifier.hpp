#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "xrid/error.hpp"
#include "xrid/sampling.hpp"

namespace xrid {

struct Snapshot {
  int epoch = 0;
  double val_mean_acc = 0.0;
  double val_min_acc = 0.0;
};

/// Trained model over S subject classes. Inputs to predict_proba are raw
/// (unscaled) features; the model applies its own train-fitted scaler.
/// Binned models take a 1 x D row, windowed models a T x F window.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string family() const = 0;
  virtual SampleMode sample_mode() const = 0;
  virtual Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const = 0;

  int num_classes() const { return static_cast<int>(classes_.size()); }
  const std::vector<std::string>& classes() const { return classes_; }
  const Scaler& scaler() const { return scaler_; }
  const Snapshot& snapshot() const { return snapshot_; }

  int predict(const Eigen::MatrixXd& x) const {
    Eigen::Index best = 0;
    predict_proba(x).maxCoeff(&best);
    return static_cast<int>(best);
  }

  int class_index(const std::string& subject) const {
    const auto it = std::lower_bound(classes_.begin(), classes_.end(), subject);
    if (it == classes_.end() || *it != subject) {
      throw DataError("unknown subject '" + subject + "'");
    }
    return static_cast<int>(it - classes_.begin());
  }

 protected:
  friend struct ClassifierAccess;
  std::vector<std::string> classes_;  // sorted; index = class id
  Scaler scaler_;
  Snapshot snapshot_;
};

/// Internal hook for the fit/load paths to install training artifacts.
struct ClassifierAccess {
  static void init(Classifier& c, std::vector<std::string> classes,
                   Scaler scaler) {
    c.classes_ = std::move(classes);
    c.scaler_ = std::move(scaler);
  }
  static void set_snapshot(Classifier& c, const Snapshot& s) {
    c.snapshot_ = s;
  }
};

}  // namespace xrid
