#pragma once

#include <functional>
#include <string>
#include <vector>

#include "xrid/geometry.hpp"
#include "xrid/take_io.hpp"

namespace xrid {

struct TakeRef {
  std::string subject_id;
  std::string take_id;
};

struct DatasetSplit {
  std::vector<TakeRef> train;
  std::vector<TakeRef> validation;  // one take per subject
  std::vector<TakeRef> test;        // one take per subject
};

struct FilterPolicy {
  double min_take_seconds = 300.0;
  double movement_threshold = 0.001;  // meters
  int min_takes_per_subject = 3;
};

/// Maximum over the 9 positional channels of the channel's standard
/// deviation; near zero for frozen armatures.
double movement_score(const Take& take);

/// Applies the take filter, keeps each subject's longest session, then
/// splits: shortest surviving take -> test, second shortest -> validation,
/// rest -> train. Length ties break by take_id. `score_fn` supplies the
/// movement score for a manifest entry (usually by loading the take file).
DatasetSplit filter_and_split(
    const Manifest& manifest, const FilterPolicy& policy,
    const std::function<double(const ManifestTake&)>& score_fn);

void write_split(const std::string& path, const DatasetSplit& split);
DatasetSplit read_split(const std::string& path);

struct SynthParams {
  int n_subjects = 10;
  int takes_per_subject = 3;
  double seconds_per_take = 120.0;
  double fps = 90.0;
  std::uint64_t seed = 0;
  // When true, each take gets its own home position/facing jitter; keep
  // false so scene-relative models memorize subject positions (the
  // offset-robustness probe relies on that).
  bool vary_home_per_take = false;
};

/// Deterministic signature-driven motion generator. Each subject gets a
/// latent signature (head height, resting wrist offsets, oscillation
/// frequencies/amplitudes/phase couplings, head sway, home position and
/// facing); takes are smooth signature-driven motion plus seeded
/// band-limited noise.
std::vector<Take> synth_generate(const SynthParams& params);

}  // namespace xrid
