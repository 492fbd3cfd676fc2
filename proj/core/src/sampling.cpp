#include "xrid/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "xrid/error.hpp"
#include "xrid/take_io.hpp"

namespace xrid {

void DataParams::validate(double source_fps) const {
  if (mode == SampleMode::Binned) {
    if (frames_per_bin < 10 || frames_per_bin > 1350) {
      throw DataError("frames_per_bin " + std::to_string(frames_per_bin) +
                      " outside [10, 1350]");
    }
  } else {
    const bool fps_ok = fps_target == 10.0 || fps_target == 30.0 ||
                        fps_target == 60.0 || fps_target == 90.0;
    if (!fps_ok) {
      throw DataError("fps_target must be one of 10, 30, 60, 90");
    }
    // 30 joins the grid values: the one-second search fixture is 30 @ 30.
    if (window_size != 10 && window_size != 30 && window_size != 100 &&
        window_size != 300) {
      throw DataError("window_size must be one of 10, 30, 100, 300");
    }
    if (source_fps > 0.0 && fps_target > source_fps + 1e-9) {
      throw DataError("fps_target exceeds source fps");
    }
  }
}

std::vector<BinnedSample> make_binned(const FeatureSequence& seq,
                                      int frames_per_bin) {
  if (frames_per_bin < 2) throw DataError("frames_per_bin must be >= 2");
  const Eigen::Index T = seq.rows.rows();
  const Eigen::Index W = seq.rows.cols();
  const Eigen::Index n_bins = T / frames_per_bin;

  std::vector<BinnedSample> out;
  out.reserve(static_cast<std::size_t>(n_bins));
  std::vector<double> sorted(static_cast<std::size_t>(frames_per_bin));
  for (Eigen::Index b = 0; b < n_bins; ++b) {
    const auto chunk = seq.rows.middleRows(b * frames_per_bin, frames_per_bin);
    BinnedSample s;
    s.subject_id = seq.subject_id;
    s.values.resize(5 * W);
    for (Eigen::Index c = 0; c < W; ++c) {
      const auto col = chunk.col(c);
      const double mean = col.mean();
      for (Eigen::Index i = 0; i < frames_per_bin; ++i) {
        sorted[static_cast<std::size_t>(i)] = col(i);
      }
      std::sort(sorted.begin(), sorted.end());
      const std::size_t n = sorted.size();
      const double median = (n % 2 == 1)
                                ? sorted[n / 2]
                                : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
      const double var = (col.array() - mean).square().sum() /
                         static_cast<double>(frames_per_bin);
      s.values(5 * c + 0) = sorted.front();
      s.values(5 * c + 1) = sorted.back();
      s.values(5 * c + 2) = mean;
      s.values(5 * c + 3) = median;
      s.values(5 * c + 4) = std::sqrt(var);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Eigen::Index> resample_indices(Eigen::Index n_rows,
                                           double seq_fps, double fps_target) {
  if (fps_target > seq_fps + 1e-9) {
    throw DataError("fps_target exceeds sequence fps");
  }
  std::vector<Eigen::Index> idx;
  if (n_rows == 0) return idx;
  if (std::abs(fps_target - seq_fps) < 1e-9) {
    idx.resize(static_cast<std::size_t>(n_rows));
    for (Eigen::Index i = 0; i < n_rows; ++i) {
      idx[static_cast<std::size_t>(i)] = i;
    }
    return idx;
  }
  const double last_t = static_cast<double>(n_rows - 1) / seq_fps;
  for (Eigen::Index k = 0;; ++k) {
    const double t = static_cast<double>(k) / fps_target;
    if (t > last_t + 0.5 / seq_fps) break;
    const Eigen::Index src = std::min<Eigen::Index>(
        n_rows - 1, static_cast<Eigen::Index>(std::llround(t * seq_fps)));
    idx.push_back(src);
  }
  return idx;
}

std::vector<WindowedSample> make_windows(const FeatureSequence& seq,
                                         double fps_target, int window_size,
                                         int stride) {
  if (stride < 1) throw DataError("stride must be >= 1");
  if (window_size < 1) throw DataError("window_size must be >= 1");
  const auto idx = resample_indices(seq.rows.rows(), seq.fps, fps_target);
  const Eigen::Index n = static_cast<Eigen::Index>(idx.size());

  std::vector<WindowedSample> out;
  for (Eigen::Index start = 0; start + window_size <= n; start += stride) {
    WindowedSample s;
    s.subject_id = seq.subject_id;
    s.fps = fps_target;
    s.values.resize(window_size, seq.rows.cols());
    for (int r = 0; r < window_size; ++r) {
      s.values.row(r) =
          seq.rows.row(idx[static_cast<std::size_t>(start + r)]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

Take resample_take(const Take& take, double fps_target) {
  if (std::abs(fps_target - take.fps) < 1e-9) return take;
  const auto idx = resample_indices(
      static_cast<Eigen::Index>(take.frames.size()), take.fps, fps_target);
  Take out;
  out.subject_id = take.subject_id;
  out.take_id = take.take_id;
  out.fps = fps_target;
  out.frames.reserve(idx.size());
  for (Eigen::Index i : idx) {
    out.frames.push_back(take.frames[static_cast<std::size_t>(i)]);
  }
  return out;
}

Eigen::VectorXd Scaler::transform(const Eigen::VectorXd& v) const {
  return (v - mean).cwiseQuotient(std);
}

Eigen::MatrixXd Scaler::transform(const Eigen::MatrixXd& m) const {
  return (m.rowwise() - mean.transpose()).array().rowwise() /
         std.transpose().array();
}

Eigen::VectorXd Scaler::inverse(const Eigen::VectorXd& v) const {
  return v.cwiseProduct(std) + mean;
}

namespace {

Scaler fit_from_rows(const Eigen::VectorXd& sum, const Eigen::VectorXd& sq_sum,
                     double n) {
  if (n <= 0.0) throw DataError("scaler: no training rows");
  Scaler s;
  s.mean = sum / n;
  Eigen::VectorXd var = sq_sum / n - s.mean.cwiseProduct(s.mean);
  s.std = var.cwiseMax(0.0).cwiseSqrt().cwiseMax(Scaler::kStdFloor);
  return s;
}

}  // namespace

Scaler fit_scaler(const std::vector<BinnedSample>& train) {
  if (train.empty()) throw DataError("scaler: empty training set");
  const Eigen::Index d = train.front().values.size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
  for (const auto& s : train) {
    sum += s.values;
    sq += s.values.cwiseProduct(s.values);
  }
  return fit_from_rows(sum, sq, static_cast<double>(train.size()));
}

Scaler fit_scaler(const std::vector<WindowedSample>& train) {
  if (train.empty()) throw DataError("scaler: empty training set");
  const Eigen::Index d = train.front().values.cols();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
  double n = 0.0;
  for (const auto& s : train) {  // every row contributes
    sum += s.values.colwise().sum().transpose();
    sq += s.values.array().square().colwise().sum().matrix().transpose();
    n += static_cast<double>(s.values.rows());
  }
  return fit_from_rows(sum, sq, n);
}

std::vector<BinnedSample> apply_scaler(const Scaler& s,
                                       const std::vector<BinnedSample>& in) {
  std::vector<BinnedSample> out = in;
  for (auto& b : out) b.values = s.transform(b.values);
  return out;
}

std::vector<WindowedSample> apply_scaler(
    const Scaler& s, const std::vector<WindowedSample>& in) {
  std::vector<WindowedSample> out = in;
  for (auto& w : out) w.values = s.transform(w.values);
  return out;
}

namespace {

void write_rows(const std::string& path,
                const std::vector<std::string>& labels,
                const std::vector<const Eigen::MatrixXd*>& mats) {
  std::string body;
  char buf[32];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    body += labels[i];
    const Eigen::MatrixXd& m = *mats[i];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        std::snprintf(buf, sizeof(buf), ",%.12g", m(r, c));
        body += buf;
      }
    }
    body += '\n';
  }
  atomic_write(path, body);
}

}  // namespace

void write_binned_samples(const std::string& path,
                          const std::vector<BinnedSample>& samples) {
  std::vector<std::string> labels;
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(samples.size());
  std::vector<const Eigen::MatrixXd*> ptrs;
  for (const auto& s : samples) {
    labels.push_back(s.subject_id);
    mats.push_back(s.values.transpose());
  }
  for (const auto& m : mats) ptrs.push_back(&m);
  write_rows(path, labels, ptrs);
}

void write_windowed_samples(const std::string& path,
                            const std::vector<WindowedSample>& samples) {
  std::vector<std::string> labels;
  std::vector<const Eigen::MatrixXd*> ptrs;
  for (const auto& s : samples) {
    labels.push_back(s.subject_id);
    ptrs.push_back(&s.values);
  }
  write_rows(path, labels, ptrs);
}

}  // namespace xrid
