#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "xrid/encoders.hpp"

namespace xrid {

/// Per-feature statistics of one fixed-size chunk, in order
/// min, max, mean, median, std (population). Length 5 x width.
struct BinnedSample {
  std::string subject_id;
  Eigen::VectorXd values;
};

struct WindowedSample {
  std::string subject_id;
  Eigen::MatrixXd values;  // window_size x width
  double fps = 0.0;
};

enum class SampleMode { Binned, Windowed };

struct DataParams {
  SampleMode mode = SampleMode::Binned;
  int frames_per_bin = 90;   // binned; valid range [10, 1350]
  double fps_target = 30.0;  // windowed; one of {10, 30, 60, 90}
  int window_size = 30;      // windowed; one of {10, 100, 300}

  double sample_seconds() const {
    return mode == SampleMode::Binned ? 0.0
                                      : window_size / fps_target;
  }
  void validate(double source_fps) const;  // throws DataError
};

/// Non-overlapping chunks of exactly frames_per_bin rows; a trailing
/// partial chunk is dropped. Returns {} when the sequence is shorter than
/// one bin.
std::vector<BinnedSample> make_binned(const FeatureSequence& seq,
                                      int frames_per_bin);

/// Nearest-source-frame indices for resampling seq_fps -> fps_target on a
/// uniform target grid starting at t=0. Identity when rates match.
std::vector<Eigen::Index> resample_indices(Eigen::Index n_rows,
                                           double seq_fps, double fps_target);

/// Resamples to fps_target, then takes windows of window_size rows at the
/// given stride. Returns {} when too short for one window.
std::vector<WindowedSample> make_windows(const FeatureSequence& seq,
                                         double fps_target, int window_size,
                                         int stride);

/// Frame decimation of a raw take (nearest source frame); used so that
/// velocity encodings difference at the resampled frame period.
Take resample_take(const Take& take, double fps_target);

struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;  // floored at 1e-8

  static constexpr double kStdFloor = 1e-8;

  Eigen::VectorXd transform(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd transform(const Eigen::MatrixXd& m) const;  // row-wise
  Eigen::VectorXd inverse(const Eigen::VectorXd& v) const;
};

Scaler fit_scaler(const std::vector<BinnedSample>& train);
Scaler fit_scaler(const std::vector<WindowedSample>& train);

std::vector<BinnedSample> apply_scaler(const Scaler& s,
                                       const std::vector<BinnedSample>& in);
std::vector<WindowedSample> apply_scaler(const Scaler& s,
                                         const std::vector<WindowedSample>& in);

void write_binned_samples(const std::string& path,
                          const std::vector<BinnedSample>& samples);
void write_windowed_samples(const std::string& path,
                            const std::vector<WindowedSample>& samples);

}  // namespace xrid
