#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "xrid/dataset.hpp"
#include "xrid/encoders.hpp"
#include "xrid/models/classifier.hpp"
#include "xrid/models/forest.hpp"
#include "xrid/models/train.hpp"

namespace xrid {

/// Loaded takes for one split role.
using TakeList = std::vector<Take>;

/// Reads every take referenced by the split role lists. Relative take
/// paths resolve against the manifest's directory.
struct LoadedSplit {
  TakeList train;
  TakeList validation;
  TakeList test;
  std::vector<std::string> classes;  // sorted subject ids
};

LoadedSplit load_split_takes(const std::string& manifest_path,
                             const DatasetSplit& split);

struct SampleBuild {
  std::vector<BinnedSample> binned;
  std::vector<WindowedSample> windowed;
};

/// Take -> encode -> sample. Windowed pipelines decimate the take to
/// fps_target before encoding so velocity features difference at the
/// target frame period; stride defaults to non-overlapping windows.
SampleBuild build_samples(const TakeList& takes, EncodingKind kind,
                          const DataParams& params, int stride = 0);

/// Architecture config for one run; `family` selects which member is live.
struct ModelSpec {
  std::string family;  // rf | mlp | frnn | lstm | gru
  RfConfig rf;
  MlpConfig mlp;
  RnnConfig rnn;

  static ModelSpec from_json(const std::string& family,
                             const nlohmann::json& config,
                             std::uint64_t seed);
  nlohmann::json to_json() const;
  bool windowed() const {
    return family == "frnn" || family == "lstm" || family == "gru";
  }
};

std::unique_ptr<Classifier> train_model(const ModelSpec& spec,
                                        EncodingKind kind,
                                        const DataParams& params,
                                        const TakeList& train,
                                        const TakeList& validation,
                                        const std::vector<std::string>& classes,
                                        const TrainConfig& train_cfg);

/// Validation MinAcc of one trained configuration; the HPO objective.
double train_and_score(const ModelSpec& spec, EncodingKind kind,
                       const DataParams& params, const TakeList& train,
                       const TakeList& validation,
                       const std::vector<std::string>& classes,
                       const TrainConfig& train_cfg);

}  // namespace xrid
