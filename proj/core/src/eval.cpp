#include "xrid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include <json.hpp>

#include "xrid/error.hpp"
#include "xrid/take_io.hpp"

namespace xrid {

EvalReport score_predictions(const std::vector<std::string>& classes,
                             const std::vector<int>& y_true,
                             const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw DataError("score: prediction/label size mismatch");
  }
  const int S = static_cast<int>(classes.size());
  EvalReport report;
  report.classes = classes;
  report.confusion = Eigen::MatrixXd::Zero(S, S);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    report.confusion(y_true[i], y_pred[i]) += 1.0;
  }
  report.per_subject_accuracy.assign(static_cast<std::size_t>(S), 0.0);
  report.n_samples.assign(static_cast<std::size_t>(S), 0.0);
  report.min_accuracy = 1.0;
  int present = 0;
  for (int s = 0; s < S; ++s) {
    const double n = report.confusion.row(s).sum();
    report.n_samples[static_cast<std::size_t>(s)] = n;
    if (n == 0.0) {
      report.flagged.push_back(classes[static_cast<std::size_t>(s)]);
      continue;
    }
    const double acc = report.confusion(s, s) / n;
    report.per_subject_accuracy[static_cast<std::size_t>(s)] = acc;
    report.mean_accuracy += acc;
    report.min_accuracy = std::min(report.min_accuracy, acc);
    ++present;
  }
  report.mean_accuracy = present > 0 ? report.mean_accuracy / present : 0.0;
  if (present == 0) report.min_accuracy = 0.0;
  return report;
}

namespace {

template <typename SampleT, typename GetX>
EvalReport score_impl(const Classifier& model,
                      const std::vector<SampleT>& samples, const GetX& get_x) {
  std::vector<int> y_true, y_pred;
  y_true.reserve(samples.size());
  y_pred.reserve(samples.size());
  for (const auto& s : samples) {
    y_true.push_back(model.class_index(s.subject_id));
    y_pred.push_back(model.predict(get_x(s)));
  }
  return score_predictions(model.classes(), y_true, y_pred);
}

}  // namespace

EvalReport score_samples(const Classifier& model,
                         const std::vector<BinnedSample>& samples) {
  return score_impl(model, samples, [](const BinnedSample& s) {
    return Eigen::MatrixXd(s.values.transpose());
  });
}

EvalReport score_samples(const Classifier& model,
                         const std::vector<WindowedSample>& samples) {
  return score_impl(model, samples,
                    [](const WindowedSample& s) { return s.values; });
}

int majority_vote(const std::vector<int>& predictions) {
  if (predictions.empty()) throw DataError("majority_vote: empty input");
  std::unordered_map<int, int> counts;
  for (int p : predictions) counts[p]++;
  int best_class = -1;
  int best_count = -1;
  for (const auto& [cls, count] : counts) {
    if (count > best_count || (count == best_count && cls < best_class)) {
      best_class = cls;
      best_count = count;
    }
  }
  return best_class;
}

VoteCurve vote_curve(const Classifier& model, const std::vector<Take>& takes,
                     EncodingKind kind, const DataParams& params,
                     const std::vector<double>& lengths_seconds,
                     double placement_stride_seconds) {
  struct PreparedTake {
    int label;
    Eigen::MatrixXd rows;
    double fps;
  };
  const bool binned = params.mode == SampleMode::Binned;

  std::vector<PreparedTake> prepared;
  for (const Take& take : takes) {
    PreparedTake p;
    p.label = model.class_index(take.subject_id);
    if (binned) {
      FeatureSequence seq = encode(take, kind);
      p.fps = seq.fps;
      p.rows = std::move(seq.rows);
    } else {
      // Velocity features difference at the resampled frame period, so
      // decimate before encoding.
      FeatureSequence seq = encode(resample_take(take, params.fps_target), kind);
      p.fps = params.fps_target;
      p.rows = std::move(seq.rows);
    }
    prepared.push_back(std::move(p));
  }

  const Eigen::Index span =
      binned ? params.frames_per_bin : params.window_size;

  auto predict_at = [&](const PreparedTake& p, Eigen::Index start,
                        std::unordered_map<long, int>& cache) {
    const auto it = cache.find(static_cast<long>(start));
    if (it != cache.end()) return it->second;
    int pred;
    const auto block = p.rows.middleRows(start, span);
    if (binned) {
      Eigen::VectorXd values(5 * p.rows.cols());
      std::vector<double> sorted(static_cast<std::size_t>(span));
      for (Eigen::Index c = 0; c < p.rows.cols(); ++c) {
        const auto col = block.col(c);
        for (Eigen::Index i = 0; i < span; ++i) {
          sorted[static_cast<std::size_t>(i)] = col(i);
        }
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double mean = col.mean();
        values(5 * c + 0) = sorted.front();
        values(5 * c + 1) = sorted.back();
        values(5 * c + 2) = mean;
        values(5 * c + 3) = (n % 2 == 1)
                                ? sorted[n / 2]
                                : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        values(5 * c + 4) = std::sqrt((col.array() - mean).square().sum() /
                                      static_cast<double>(span));
      }
      pred = model.predict(values.transpose());
    } else {
      pred = model.predict(block);
    }
    cache.emplace(static_cast<long>(start), pred);
    return pred;
  };

  VoteCurve curve;
  std::vector<std::unordered_map<long, int>> caches(prepared.size());

  for (double L : lengths_seconds) {
    bool skipped = false;
    std::unordered_map<int, std::pair<double, double>> by_subject;

    for (std::size_t pi = 0; pi < prepared.size(); ++pi) {
      const PreparedTake& p = prepared[pi];
      const double sample_sec = static_cast<double>(span) / p.fps;
      if (L + 1e-9 < sample_sec) {
        skipped = true;
        break;
      }
      const double take_sec = static_cast<double>(p.rows.rows()) / p.fps;
      const auto samples_per_placement = static_cast<Eigen::Index>(
          std::floor(L / sample_sec + 1e-9));

      for (double t0 = 0.0; t0 + L <= take_sec + 1e-9;
           t0 += placement_stride_seconds) {
        const auto start =
            static_cast<Eigen::Index>(std::llround(t0 * p.fps));
        if (start + samples_per_placement * span > p.rows.rows()) break;
        std::vector<int> preds;
        preds.reserve(static_cast<std::size_t>(samples_per_placement));
        for (Eigen::Index k = 0; k < samples_per_placement; ++k) {
          preds.push_back(predict_at(p, start + k * span, caches[pi]));
        }
        auto& [correct, total] = by_subject[p.label];
        if (majority_vote(preds) == p.label) correct += 1.0;
        total += 1.0;
      }
    }

    if (skipped || by_subject.empty()) {
      std::fprintf(stderr,
                   "vote_curve: skipping length %.3f s (< one sample)\n", L);
      continue;
    }
    double acc = 0.0;
    for (const auto& [label, ct] : by_subject) {
      acc += ct.second > 0.0 ? ct.first / ct.second : 0.0;
    }
    curve.sequence_length_seconds.push_back(L);
    curve.accuracy_at_length.push_back(acc /
                                       static_cast<double>(by_subject.size()));
  }
  return curve;
}

Take sr_offset(const Take& take, double dx, double dz) {
  Take out = take;
  for (MotionFrame& f : out.frames) {
    for (Pose* p : {&f.head, &f.wrist_left, &f.wrist_right}) {
      p->position.x += dx;
      p->position.z += dz;
    }
  }
  return out;
}

void write_report(const std::string& path, const EvalReport& report) {
  using nlohmann::json;
  json per_subject = json::object();
  json n_samples = json::object();
  for (std::size_t s = 0; s < report.classes.size(); ++s) {
    per_subject[report.classes[s]] = report.per_subject_accuracy[s];
    n_samples[report.classes[s]] = report.n_samples[s];
  }
  json confusion = json::array();
  for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) {
      row.push_back(report.confusion(r, c));
    }
    confusion.push_back(row);
  }
  json doc = {{"mean_accuracy", report.mean_accuracy},
              {"min_accuracy", report.min_accuracy},
              {"per_subject_accuracy", per_subject},
              {"n_samples", n_samples},
              {"confusion", confusion},
              {"flagged_subjects", report.flagged}};
  atomic_write(path, doc.dump(2) + "\n");
}

void write_vote_curve(const std::string& path, const VoteCurve& curve) {
  std::string body = "length_seconds,accuracy\n";
  char buf[64];
  for (std::size_t i = 0; i < curve.sequence_length_seconds.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g\n",
                  curve.sequence_length_seconds[i],
                  curve.accuracy_at_length[i]);
    body += buf;
  }
  atomic_write(path, body);
}

}  // namespace xrid
