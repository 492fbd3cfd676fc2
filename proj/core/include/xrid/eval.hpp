#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "xrid/models/classifier.hpp"

namespace xrid {

struct EvalReport {
  std::vector<std::string> classes;
  std::vector<double> per_subject_accuracy;
  std::vector<double> n_samples;        // n_s per subject
  double mean_accuracy = 0.0;           // macro average over subjects
  double min_accuracy = 0.0;
  Eigen::MatrixXd confusion;            // true x predicted counts
  std::vector<std::string> flagged;     // subjects with n_s = 0
};

EvalReport score_predictions(const std::vector<std::string>& classes,
                             const std::vector<int>& y_true,
                             const std::vector<int>& y_pred);

EvalReport score_samples(const Classifier& model,
                         const std::vector<BinnedSample>& samples);
EvalReport score_samples(const Classifier& model,
                         const std::vector<WindowedSample>& samples);

/// Modal class; ties break toward the smallest class index.
int majority_vote(const std::vector<int>& predictions);

struct VoteCurve {
  std::vector<double> sequence_length_seconds;
  std::vector<double> accuracy_at_length;
};

/// Slides an L-second window over each test take at the placement stride,
/// majority-votes the model's consecutive non-overlapping sample
/// predictions inside each placement, and macro-averages correctness over
/// subjects. Lengths shorter than one sample are skipped.
VoteCurve vote_curve(const Classifier& model, const std::vector<Take>& takes,
                     EncodingKind kind, const DataParams& params,
                     const std::vector<double>& lengths_seconds,
                     double placement_stride_seconds = 1.0);

/// Scene shift of +dx/+dz meters on every position; rotations untouched.
Take sr_offset(const Take& take, double dx, double dz);

void write_report(const std::string& path, const EvalReport& report);
void write_vote_curve(const std::string& path, const VoteCurve& curve);

}  // namespace xrid
