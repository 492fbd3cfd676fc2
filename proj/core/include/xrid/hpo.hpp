#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xrid/rng.hpp"
#include "xrid/sampling.hpp"

namespace xrid {

/// One search unit: architecture family ("rf", "mlp", "frnn", "lstm",
/// "gru") x data encoding.
struct Combination {
  std::string family;
  EncodingKind encoding = EncodingKind::BR;

  std::string tag() const { return family + "+" + to_string(encoding); }
};

struct Trial {
  int index = 0;
  std::string stage;  // "stage1" | "stage2"
  nlohmann::json config;
  DataParams data;
  double objective = 0.0;  // validation MinAcc
  std::string status;      // "completed" | "failed"
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

struct StudyResult {
  std::vector<Trial> trials;
  int best_index = -1;  // argmax objective, earliest trial on ties

  const Trial& best() const;
};

/// Trains one configuration and returns validation MinAcc. Exceptions mark
/// the trial failed without aborting the study.
using TrainEvalFn =
    std::function<double(const nlohmann::json& config, const DataParams&)>;

/// Seeded random draw from the architectural search space:
/// rf: n_estimators [50,1000], min_samples_leaf [1,1000];
/// mlp: layers [1,6], layer_size [10,300], lr log-uniform [1e-5,1e-2];
/// rnn: hidden [20,200], layers [1,8], dropout [0,0.6], lr log [1e-4,1e-2].
nlohmann::json sample_config(const std::string& family, Rng& rng);

/// Stage-1 fixture: one second of data. 90 frames per bin for binned
/// families, window 30 @ 30 fps for recurrent ones.
DataParams stage1_data_params(const std::string& family);

/// Stage-2 grid: binned {10,30,90,180,450,700,900,1350} frames per bin;
/// windowed {10,30,60,90} fps x {10,100,300} frames.
std::vector<DataParams> stage2_grid(const std::string& family);

/// Random search over the architectural space with the stage-1 data
/// fixture. Trials append to `log_path` (one JSON record per line); a
/// rerun with the same seed resumes from completed trials.
StudyResult stage1(const Combination& combination, int budget,
                   std::uint64_t seed, const TrainEvalFn& train_eval,
                   const std::string& log_path);

/// One training per stage-2 grid point using the stage-1 winner config.
StudyResult stage2(const Combination& combination,
                   const nlohmann::json& best_config, std::uint64_t seed,
                   const TrainEvalFn& train_eval, const std::string& log_path);

}  // namespace xrid
