#include "xrid/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include "xrid/error.hpp"
#include "xrid/eval.hpp"
#include "xrid/models/forest.hpp"

namespace xrid {

LoadedSplit load_split_takes(const std::string& manifest_path,
                             const DatasetSplit& split) {
  const Manifest manifest = read_manifest(manifest_path);
  const std::filesystem::path base =
      std::filesystem::path(manifest_path).parent_path();

  std::map<std::pair<std::string, std::string>, std::string> paths;
  for (const auto& s : manifest.subjects) {
    for (const auto& t : s.takes) {
      paths[{s.subject_id, t.take_id}] = t.path;
    }
  }

  auto load = [&](const std::vector<TakeRef>& refs) {
    TakeList takes;
    for (const auto& ref : refs) {
      const auto it = paths.find({ref.subject_id, ref.take_id});
      if (it == paths.end()) {
        throw DataError("split references unknown take " + ref.subject_id +
                        "/" + ref.take_id);
      }
      std::filesystem::path p(it->second);
      if (p.is_relative()) p = base / p;
      takes.push_back(read_take(p.string()));
    }
    return takes;
  };

  LoadedSplit out;
  out.train = load(split.train);
  out.validation = load(split.validation);
  out.test = load(split.test);

  for (const auto& ref : split.test) out.classes.push_back(ref.subject_id);
  std::sort(out.classes.begin(), out.classes.end());
  out.classes.erase(std::unique(out.classes.begin(), out.classes.end()),
                    out.classes.end());
  return out;
}

SampleBuild build_samples(const TakeList& takes, EncodingKind kind,
                          const DataParams& params, int stride) {
  SampleBuild out;
  for (const Take& take : takes) {
    params.validate(take.fps);
    if (params.mode == SampleMode::Binned) {
      const FeatureSequence seq = encode(take, kind);
      auto samples = make_binned(seq, params.frames_per_bin);
      out.binned.insert(out.binned.end(),
                        std::make_move_iterator(samples.begin()),
                        std::make_move_iterator(samples.end()));
    } else {
      const FeatureSequence seq =
          encode(resample_take(take, params.fps_target), kind);
      const int effective_stride = stride > 0 ? stride : params.window_size;
      auto samples = make_windows(seq, params.fps_target, params.window_size,
                                  effective_stride);
      out.windowed.insert(out.windowed.end(),
                          std::make_move_iterator(samples.begin()),
                          std::make_move_iterator(samples.end()));
    }
  }
  return out;
}

ModelSpec ModelSpec::from_json(const std::string& family,
                               const nlohmann::json& config,
                               std::uint64_t seed) {
  ModelSpec spec;
  spec.family = family;
  if (family == "rf") {
    spec.rf.n_estimators = config.at("n_estimators").get<int>();
    spec.rf.min_samples_leaf = config.at("min_samples_leaf").get<int>();
    spec.rf.seed = seed;
  } else if (family == "mlp") {
    spec.mlp.layers = config.at("layers").get<int>();
    spec.mlp.layer_size = config.at("layer_size").get<int>();
    spec.mlp.learning_rate = config.at("learning_rate").get<double>();
    spec.mlp.seed = seed;
  } else if (spec.windowed()) {
    spec.rnn.kind = rnn_kind_from_string(family);
    spec.rnn.hidden_size = config.at("hidden_size").get<int>();
    spec.rnn.layers = config.at("layers").get<int>();
    spec.rnn.dropout = config.at("dropout").get<double>();
    spec.rnn.learning_rate = config.at("learning_rate").get<double>();
    spec.rnn.seed = seed;
  } else {
    throw DataError("unknown model family '" + family + "'");
  }
  return spec;
}

nlohmann::json ModelSpec::to_json() const {
  if (family == "rf") {
    return {{"n_estimators", rf.n_estimators},
            {"min_samples_leaf", rf.min_samples_leaf}};
  }
  if (family == "mlp") {
    return {{"layers", mlp.layers},
            {"layer_size", mlp.layer_size},
            {"learning_rate", mlp.learning_rate}};
  }
  return {{"hidden_size", rnn.hidden_size},
          {"layers", rnn.layers},
          {"dropout", rnn.dropout},
          {"learning_rate", rnn.learning_rate}};
}

std::unique_ptr<Classifier> train_model(const ModelSpec& spec,
                                        EncodingKind kind,
                                        const DataParams& params,
                                        const TakeList& train,
                                        const TakeList& validation,
                                        const std::vector<std::string>& classes,
                                        const TrainConfig& train_cfg) {
  // Training windows overlap (quarter-window stride) for more examples
  // per take; validation and test stay non-overlapping so reported scores
  // count each frame once.
  const int train_stride = params.mode == SampleMode::Windowed
                               ? std::max(1, params.window_size / 4)
                               : 0;
  const SampleBuild train_samples =
      build_samples(train, kind, params, train_stride);
  const SampleBuild val_samples = build_samples(validation, kind, params);

  if (spec.family == "rf") {
    if (params.mode != SampleMode::Binned) {
      throw DataError("rf requires binned samples");
    }
    return rf_fit(train_samples.binned, classes, spec.rf);
  }
  if (spec.family == "mlp") {
    if (params.mode != SampleMode::Binned) {
      throw DataError("mlp requires binned samples");
    }
    return mlp_fit(train_samples.binned, val_samples.binned, classes,
                   spec.mlp, train_cfg);
  }
  if (params.mode != SampleMode::Windowed) {
    throw DataError(spec.family + " requires windowed samples");
  }
  return rnn_fit(train_samples.windowed, val_samples.windowed, classes,
                 spec.rnn, train_cfg);
}

double train_and_score(const ModelSpec& spec, EncodingKind kind,
                       const DataParams& params, const TakeList& train,
                       const TakeList& validation,
                       const std::vector<std::string>& classes,
                       const TrainConfig& train_cfg) {
  const auto model =
      train_model(spec, kind, params, train, validation, classes, train_cfg);
  const SampleBuild val_samples = build_samples(validation, kind, params);
  const EvalReport report =
      params.mode == SampleMode::Binned
          ? score_samples(*model, val_samples.binned)
          : score_samples(*model, val_samples.windowed);
  return report.min_accuracy;
}

}  // namespace xrid
