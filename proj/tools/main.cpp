// xrid command-line front end: import, synth, split, encode, train, eval,
// hpo, report.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 training divergence.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xrid/bvh.hpp"
#include "xrid/dataset.hpp"
#include "xrid/encoders.hpp"
#include "xrid/error.hpp"
#include "xrid/eval.hpp"
#include "xrid/hpo.hpp"
#include "xrid/models/model_io.hpp"
#include "xrid/pipeline.hpp"
#include "xrid/rng.hpp"
#include "xrid/sampling.hpp"
#include "xrid/take_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kConfigVersion = 1;

// XRID_WORK_DIR overrides relative output locations.
std::string work_dir() {
  const char* env = std::getenv("XRID_WORK_DIR");
  return env ? std::string(env) : std::string(".");
}

std::string resolve(const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(work_dir()) / path).string();
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw xrid::DataError("cannot open config file: " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw xrid::DataError("config is not valid JSON: " + path);
  if (!doc.contains("version")) {
    throw xrid::DataError("config missing 'version' field: " + path);
  }
  if (doc.at("version").get<int>() != kConfigVersion) {
    throw xrid::DataError("unsupported config version in " + path);
  }
  return doc;
}

// Pulls a config value unless the flag was given on the command line.
template <typename T>
void maybe_from_config(const CLI::App& app, const std::string& flag,
                       const json& cfg, const std::string& key, T& out) {
  if (app.count(flag) > 0) return;
  if (cfg.contains(key)) out = cfg.at(key).get<T>();
}

struct DataFlags {
  std::string mode = "binned";
  int frames_per_bin = 90;
  double fps_target = 30.0;
  int window_size = 30;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "Sampling mode: binned | windowed")
        ->check(CLI::IsMember({"binned", "windowed"}));
    cmd->add_option("--frames-per-bin", frames_per_bin,
                    "Frames per statistics bin (binned mode)");
    cmd->add_option("--fps-target", fps_target,
                    "Resample rate in Hz (windowed mode)");
    cmd->add_option("--window-size", window_size,
                    "Frames per window (windowed mode)");
  }

  void load(const CLI::App& app, const json& cfg) {
    maybe_from_config(app, "--mode", cfg, "mode", mode);
    maybe_from_config(app, "--frames-per-bin", cfg, "frames_per_bin",
                      frames_per_bin);
    maybe_from_config(app, "--fps-target", cfg, "fps_target", fps_target);
    maybe_from_config(app, "--window-size", cfg, "window_size", window_size);
  }

  xrid::DataParams params() const {
    xrid::DataParams p;
    p.mode = mode == "windowed" ? xrid::SampleMode::Windowed
                                : xrid::SampleMode::Binned;
    p.frames_per_bin = frames_per_bin;
    p.fps_target = fps_target;
    p.window_size = window_size;
    return p;
  }
};

double manifest_fps(const xrid::Manifest& manifest) {
  for (const auto& s : manifest.subjects) {
    for (const auto& t : s.takes) return t.fps;
  }
  throw xrid::DataError("manifest has no takes");
}

std::string take_filename(const std::string& subject_id,
                          const std::string& take_id) {
  return subject_id + "_" + take_id + ".csv";
}

// ---------------------------------------------------------------- import

int cmd_import(const std::string& bvh_dir, const std::string& out_dir,
               const std::string& head, const std::string& left,
               const std::string& right, double unit_scale,
               const std::string& axes, bool single_scene) {
  const xrid::AxisMap axis_map = xrid::AxisMap::parse(axes);
  fs::create_directories(out_dir);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(bvh_dir)) {
    if (entry.path().extension() == ".bvh") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw xrid::DataError("no .bvh files in " + bvh_dir);

  // Filenames follow subject_session_take.bvh or subject_take.bvh; the
  // first token is the subject id.
  std::map<std::string, xrid::ManifestSubject> subjects;
  for (const auto& file : files) {
    const std::string stem = file.stem().string();
    const auto underscore = stem.find('_');
    if (underscore == std::string::npos || underscore == 0) {
      throw xrid::DataError("cannot derive subject id from filename: " +
                            file.filename().string());
    }
    const std::string subject_id = stem.substr(0, underscore);
    std::string session_id = "s0";
    const auto second = stem.find('_', underscore + 1);
    if (second != std::string::npos) {
      session_id = stem.substr(underscore + 1, second - underscore - 1);
    }

    const xrid::BvhClip clip = xrid::parse_bvh_file(file.string());
    xrid::Take take = xrid::extract_three_point(clip, head, left, right,
                                                unit_scale, axis_map);
    take.subject_id = subject_id;
    take.take_id = stem;

    const std::string rel = take_filename(subject_id, stem);
    xrid::write_take((fs::path(out_dir) / rel).string(), take);

    xrid::ManifestTake entry;
    entry.take_id = stem;
    entry.path = rel;
    entry.fps = take.fps;
    entry.frame_count = take.frames.size();
    entry.two_subject_scene = !single_scene;
    entry.session_id = session_id;
    auto& subject = subjects[subject_id];
    subject.subject_id = subject_id;
    subject.takes.push_back(entry);
    std::fprintf(stderr, "imported %s (%zu frames @ %g fps)\n",
                 file.filename().string().c_str(), take.frames.size(),
                 take.fps);
  }

  xrid::Manifest manifest;
  for (auto& [id, subject] : subjects) manifest.subjects.push_back(subject);
  xrid::write_manifest((fs::path(out_dir) / "manifest.json").string(),
                       manifest);
  return 0;
}

// ----------------------------------------------------------------- synth

int cmd_synth(const std::string& out_dir, const xrid::SynthParams& params) {
  fs::create_directories(out_dir);
  const std::vector<xrid::Take> takes = xrid::synth_generate(params);

  std::map<std::string, xrid::ManifestSubject> subjects;
  for (const auto& take : takes) {
    const std::string rel = take_filename(take.subject_id, take.take_id);
    xrid::write_take((fs::path(out_dir) / rel).string(), take);
    xrid::ManifestTake entry;
    entry.take_id = take.take_id;
    entry.path = rel;
    entry.fps = take.fps;
    entry.frame_count = take.frames.size();
    entry.two_subject_scene = true;
    entry.session_id = "s0";
    auto& subject = subjects[take.subject_id];
    subject.subject_id = take.subject_id;
    subject.takes.push_back(entry);
  }
  xrid::Manifest manifest;
  for (auto& [id, subject] : subjects) manifest.subjects.push_back(subject);
  xrid::write_manifest((fs::path(out_dir) / "manifest.json").string(),
                       manifest);
  std::fprintf(stderr, "wrote %zu takes for %zu subjects to %s\n",
               takes.size(), subjects.size(), out_dir.c_str());
  return 0;
}

// ----------------------------------------------------------------- split

int cmd_split(const std::string& manifest_path, const std::string& out_path,
              const xrid::FilterPolicy& policy) {
  const xrid::Manifest manifest = xrid::read_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  const auto score = [&](const xrid::ManifestTake& t) {
    fs::path p(t.path);
    if (p.is_relative()) p = base / p;
    return xrid::movement_score(xrid::read_take(p.string()));
  };
  const xrid::DatasetSplit split =
      xrid::filter_and_split(manifest, policy, score);
  xrid::write_split(out_path, split);
  std::fprintf(stderr, "split: %zu train / %zu validation / %zu test takes\n",
               split.train.size(), split.validation.size(),
               split.test.size());
  return 0;
}

// ---------------------------------------------------------------- encode

int cmd_encode(const std::string& manifest_path, const std::string& split_path,
               const std::string& kind_name, const std::string& out_dir) {
  const xrid::EncodingKind kind = xrid::encoding_from_string(kind_name);
  const xrid::DatasetSplit split = xrid::read_split(split_path);
  const xrid::LoadedSplit loaded =
      xrid::load_split_takes(manifest_path, split);
  fs::create_directories(out_dir);

  const auto emit = [&](const xrid::TakeList& takes, const char* role) {
    for (const auto& take : takes) {
      const xrid::FeatureSequence seq = xrid::encode(take, kind);
      const std::string name = std::string(role) + "_" + take.subject_id +
                               "_" + take.take_id + "." + kind_name + ".csv";
      xrid::write_feature_sequence((fs::path(out_dir) / name).string(), seq);
    }
  };
  emit(loaded.train, "train");
  emit(loaded.validation, "validation");
  emit(loaded.test, "test");
  return 0;
}

// ----------------------------------------------------------------- train

struct TrainArgs {
  std::string config_path;
  std::string manifest;
  std::string split;
  std::string kind = "br";
  std::string family = "rf";
  std::string model_out = "model.json";
  std::string log_out;
  std::uint64_t seed = 0;
  int epochs = 300;
  int batch_size = 256;
  int jobs = 1;
  DataFlags data;
  // Architecture hyperparameters; defaults match the mid-range presets.
  int n_estimators = 100;
  int min_samples_leaf = 1;
  int layers = 3;
  int layer_size = 128;
  int hidden_size = 128;
  double dropout = 0.0;
  double learning_rate = 1e-3;
};

json hyper_json(const TrainArgs& a) {
  if (a.family == "rf") {
    return {{"n_estimators", a.n_estimators},
            {"min_samples_leaf", a.min_samples_leaf}};
  }
  if (a.family == "mlp") {
    return {{"layers", a.layers},
            {"layer_size", a.layer_size},
            {"learning_rate", a.learning_rate}};
  }
  return {{"hidden_size", a.hidden_size},
          {"layers", a.layers},
          {"dropout", a.dropout},
          {"learning_rate", a.learning_rate}};
}

void write_train_log(const std::string& path,
                     const std::vector<xrid::EpochStats>& log) {
  std::string body = "epoch,train_loss,val_mean_acc,val_min_acc\n";
  char buf[128];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", e.epoch,
                  e.train_loss, e.val_mean_acc, e.val_min_acc);
    body += buf;
  }
  xrid::atomic_write(path, body);
}

int cmd_train(const CLI::App& cmd, TrainArgs& a) {
  if (!a.config_path.empty()) {
    const json cfg = load_config_file(a.config_path);
    maybe_from_config(cmd, "--manifest", cfg, "manifest", a.manifest);
    maybe_from_config(cmd, "--split", cfg, "split", a.split);
    maybe_from_config(cmd, "--kind", cfg, "kind", a.kind);
    maybe_from_config(cmd, "--family", cfg, "family", a.family);
    maybe_from_config(cmd, "--out", cfg, "out", a.model_out);
    maybe_from_config(cmd, "--log", cfg, "log", a.log_out);
    maybe_from_config(cmd, "--seed", cfg, "seed", a.seed);
    maybe_from_config(cmd, "--epochs", cfg, "epochs", a.epochs);
    maybe_from_config(cmd, "--batch-size", cfg, "batch_size", a.batch_size);
    maybe_from_config(cmd, "--jobs", cfg, "jobs", a.jobs);
    a.data.load(cmd, cfg);
    if (cfg.contains("model")) {
      const json& m = cfg.at("model");
      if (m.contains("n_estimators") && cmd.count("--n-estimators") == 0)
        a.n_estimators = m.at("n_estimators").get<int>();
      if (m.contains("min_samples_leaf") &&
          cmd.count("--min-samples-leaf") == 0)
        a.min_samples_leaf = m.at("min_samples_leaf").get<int>();
      if (m.contains("layers") && cmd.count("--layers") == 0)
        a.layers = m.at("layers").get<int>();
      if (m.contains("layer_size") && cmd.count("--layer-size") == 0)
        a.layer_size = m.at("layer_size").get<int>();
      if (m.contains("hidden_size") && cmd.count("--hidden-size") == 0)
        a.hidden_size = m.at("hidden_size").get<int>();
      if (m.contains("dropout") && cmd.count("--dropout") == 0)
        a.dropout = m.at("dropout").get<double>();
      if (m.contains("learning_rate") && cmd.count("--lr") == 0)
        a.learning_rate = m.at("learning_rate").get<double>();
    }
  }
  if (a.manifest.empty() || a.split.empty()) {
    std::fprintf(stderr, "train: --manifest and --split are required\n");
    return 1;
  }

  const xrid::EncodingKind kind = xrid::encoding_from_string(a.kind);
  const xrid::DatasetSplit split = xrid::read_split(resolve(a.split));
  const xrid::LoadedSplit loaded =
      xrid::load_split_takes(resolve(a.manifest), split);

  xrid::ModelSpec spec = xrid::ModelSpec::from_json(
      a.family, hyper_json(a), xrid::derive_seed(a.seed, "model"));
  spec.rf.jobs = a.jobs;

  xrid::DataParams params = a.data.params();
  if (spec.windowed() && params.mode != xrid::SampleMode::Windowed) {
    params.mode = xrid::SampleMode::Windowed;
  }
  if (!spec.windowed()) params.mode = xrid::SampleMode::Binned;

  xrid::TrainConfig train_cfg;
  train_cfg.max_epochs = a.epochs;
  train_cfg.batch_size = a.batch_size;
  train_cfg.seed = xrid::derive_seed(a.seed, "train");
  train_cfg.verbose = true;

  const auto model = xrid::train_model(spec, kind, params, loaded.train,
                                       loaded.validation, loaded.classes,
                                       train_cfg);
  xrid::save_model(resolve(a.model_out), *model);
  std::fprintf(stderr, "model written to %s\n", a.model_out.c_str());

  if (!a.log_out.empty()) {
    const std::vector<xrid::EpochStats>* log = nullptr;
    if (const auto* mlp = dynamic_cast<const xrid::MlpModel*>(model.get()))
      log = &mlp->history.log;
    if (const auto* rnn = dynamic_cast<const xrid::RnnModel*>(model.get()))
      log = &rnn->history.log;
    if (log) write_train_log(resolve(a.log_out), *log);
  }
  return 0;
}

// ------------------------------------------------------------------ eval

int cmd_eval(const std::string& model_path, const std::string& manifest_path,
             const std::string& split_path, const std::string& kind_name,
             const DataFlags& data, const std::string& report_out,
             const std::string& curve_out,
             const std::vector<double>& lengths,
             const std::vector<double>& offset) {
  const auto model = xrid::load_model(resolve(model_path));
  const xrid::EncodingKind kind = xrid::encoding_from_string(kind_name);
  const xrid::DatasetSplit split = xrid::read_split(resolve(split_path));
  const xrid::LoadedSplit loaded =
      xrid::load_split_takes(resolve(manifest_path), split);

  xrid::DataParams params = data.params();
  params.mode = model->sample_mode();

  xrid::TakeList test = loaded.test;
  if (!offset.empty()) {
    if (offset.size() != 2) {
      std::fprintf(stderr, "eval: --offset takes exactly two values\n");
      return 1;
    }
    for (auto& take : test) take = xrid::sr_offset(take, offset[0], offset[1]);
  }

  const xrid::SampleBuild samples = xrid::build_samples(test, kind, params);
  const xrid::EvalReport report =
      params.mode == xrid::SampleMode::Binned
          ? xrid::score_samples(*model, samples.binned)
          : xrid::score_samples(*model, samples.windowed);
  xrid::write_report(resolve(report_out), report);
  std::printf("mean_accuracy %.6f\nmin_accuracy %.6f\n", report.mean_accuracy,
              report.min_accuracy);
  for (const auto& flagged : report.flagged) {
    std::fprintf(stderr, "warning: no samples for subject %s\n",
                 flagged.c_str());
  }

  if (!curve_out.empty()) {
    const xrid::VoteCurve curve =
        xrid::vote_curve(*model, test, kind, params, lengths);
    xrid::write_vote_curve(resolve(curve_out), curve);
  }
  return 0;
}

// ------------------------------------------------------------------- hpo

int cmd_hpo(const std::string& family, const std::string& kind_name,
            int stage, int budget, const std::string& manifest_path,
            const std::string& split_path, const std::string& log_path,
            const std::string& winner_out, std::uint64_t seed, int jobs,
            int epochs) {
  const xrid::EncodingKind kind = xrid::encoding_from_string(kind_name);
  const xrid::DatasetSplit split = xrid::read_split(resolve(split_path));
  const xrid::LoadedSplit loaded =
      xrid::load_split_takes(resolve(manifest_path), split);

  xrid::Combination combo{family, kind};
  xrid::TrainConfig train_cfg;
  train_cfg.max_epochs = epochs;
  train_cfg.seed = xrid::derive_seed(seed, "hpo-train");

  const xrid::TrainEvalFn evaluate = [&](const json& config,
                                         const xrid::DataParams& params) {
    xrid::ModelSpec spec = xrid::ModelSpec::from_json(
        family, config, xrid::derive_seed(seed, "hpo-model"));
    spec.rf.jobs = jobs;
    return xrid::train_and_score(spec, kind, params, loaded.train,
                                 loaded.validation, loaded.classes,
                                 train_cfg);
  };

  xrid::StudyResult result;
  if (stage == 1) {
    result = xrid::stage1(combo, budget, seed, evaluate, resolve(log_path));
  } else {
    // Stage 2 sweeps the data grid with the stage-1 winner's architecture.
    // Stage-1 trials replay from the log; missing ones rerun first.
    const xrid::StudyResult s1 =
        xrid::stage1(combo, budget, seed, evaluate, resolve(log_path));
    result = xrid::stage2(combo, s1.best().config, seed, evaluate,
                          resolve(log_path));
  }

  const xrid::Trial& best = result.best();
  json winner = {{"version", kConfigVersion},
                 {"family", family},
                 {"kind", kind_name},
                 {"model", best.config},
                 {"objective", best.objective},
                 {"stage", best.stage}};
  if (best.data.mode == xrid::SampleMode::Binned) {
    winner["mode"] = "binned";
    winner["frames_per_bin"] = best.data.frames_per_bin;
  } else {
    winner["mode"] = "windowed";
    winner["fps_target"] = best.data.fps_target;
    winner["window_size"] = best.data.window_size;
  }
  if (!winner_out.empty()) {
    xrid::atomic_write(resolve(winner_out), winner.dump(2) + "\n");
  }
  std::printf("best objective %.6f (trial %d, %s)\n", best.objective,
              best.index, best.stage.c_str());
  return 0;
}

// ---------------------------------------------------------------- report

int cmd_report(const std::vector<std::string>& entries,
               const std::string& out_path) {
  // Each entry is label=path/to/eval_report.json; the summary mirrors the
  // accuracy-per-architecture-and-encoding table layout.
  std::ostringstream table;
  table << "| run | mean accuracy | min accuracy |\n";
  table << "|-----|---------------|--------------|\n";
  char buf[160];
  for (const auto& entry : entries) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw xrid::DataError("report entries are label=path, got: " + entry);
    }
    const std::string label = entry.substr(0, eq);
    std::ifstream in(resolve(entry.substr(eq + 1)));
    if (!in) throw xrid::DataError("cannot open report: " + entry.substr(eq + 1));
    const json doc = json::parse(in);
    std::snprintf(buf, sizeof(buf), "| %s | %.4f | %.4f |\n", label.c_str(),
                  doc.at("mean_accuracy").get<double>(),
                  doc.at("min_accuracy").get<double>());
    table << buf;
  }
  if (out_path.empty()) {
    std::fputs(table.str().c_str(), stdout);
  } else {
    xrid::atomic_write(resolve(out_path), table.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xrid: user identification from head and hand motion"};
  app.require_subcommand(1);

  // import
  auto* import_cmd = app.add_subcommand(
      "import", "Convert a directory of BVH files into takes + manifest");
  std::string bvh_dir, import_out = "data", head = "Head",
                       left = "LeftHand", right = "RightHand", axes = "xyz";
  double unit_scale = 1.0;
  bool single_scene = false;
  import_cmd->add_option("--bvh-dir", bvh_dir, "Directory of .bvh files")
      ->required();
  import_cmd->add_option("--out", import_out, "Output data directory");
  import_cmd->add_option("--head", head, "Head joint name");
  import_cmd->add_option("--left", left, "Left wrist joint name");
  import_cmd->add_option("--right", right, "Right wrist joint name");
  import_cmd->add_option("--unit-scale", unit_scale,
                         "Multiply positions into meters (0.01 for cm)");
  import_cmd->add_option("--axes", axes, "Axis remap, e.g. xyz or x-zy");
  import_cmd->add_flag("--single-scene", single_scene,
                       "Mark takes as single-subject recordings");

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate seeded synthetic subjects");
  std::string synth_out = "data";
  xrid::SynthParams synth;
  synth_cmd->add_option("--out", synth_out, "Output data directory");
  synth_cmd->add_option("--subjects", synth.n_subjects, "Subject count");
  synth_cmd->add_option("--takes", synth.takes_per_subject,
                        "Takes per subject");
  synth_cmd->add_option("--seconds", synth.seconds_per_take,
                        "Take length in seconds");
  synth_cmd->add_option("--fps", synth.fps, "Capture rate in Hz");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_flag("--vary-home", synth.vary_home_per_take,
                      "Jitter the home position per take");

  // split
  auto* split_cmd = app.add_subcommand(
      "split", "Filter takes and write the train/validation/test split");
  std::string split_manifest, split_out = "split.csv";
  xrid::FilterPolicy policy;
  split_cmd->add_option("--manifest", split_manifest, "Manifest path")
      ->required();
  split_cmd->add_option("--out", split_out, "Split CSV path");
  split_cmd->add_option("--min-seconds", policy.min_take_seconds,
                        "Minimum take length to keep");
  split_cmd->add_option("--movement-threshold", policy.movement_threshold,
                        "Minimum positional std in meters");
  split_cmd->add_option("--min-takes", policy.min_takes_per_subject,
                        "Minimum surviving takes per subject");

  // encode
  auto* encode_cmd =
      app.add_subcommand("encode", "Write per-take feature CSVs");
  std::string enc_manifest, enc_split, enc_kind = "br", enc_out = "features";
  encode_cmd->add_option("--manifest", enc_manifest, "Manifest path")
      ->required();
  encode_cmd->add_option("--split", enc_split, "Split CSV path")->required();
  encode_cmd->add_option("--kind", enc_kind, "Encoding: sr | br | brv")
      ->check(CLI::IsMember({"sr", "br", "brv"}));
  encode_cmd->add_option("--out", enc_out, "Output directory");

  // train
  auto* train_cmd =
      app.add_subcommand("train", "Train one classifier configuration");
  TrainArgs ta;
  train_cmd->add_option("--config", ta.config_path,
                        "JSON run config (flags override file values)");
  train_cmd->add_option("--manifest", ta.manifest, "Manifest path");
  train_cmd->add_option("--split", ta.split, "Split CSV path");
  train_cmd->add_option("--kind", ta.kind, "Encoding: sr | br | brv")
      ->check(CLI::IsMember({"sr", "br", "brv"}));
  train_cmd
      ->add_option("--family", ta.family,
                   "Model family: rf | mlp | frnn | lstm | gru")
      ->check(CLI::IsMember({"rf", "mlp", "frnn", "lstm", "gru"}));
  train_cmd->add_option("--out", ta.model_out, "Model output path");
  train_cmd->add_option("--log", ta.log_out, "Per-epoch training log CSV");
  train_cmd->add_option("--seed", ta.seed, "Global seed");
  train_cmd->add_option("--epochs", ta.epochs, "Epoch cap");
  train_cmd->add_option("--batch-size", ta.batch_size, "Mini-batch size");
  train_cmd->add_option("--jobs", ta.jobs, "Worker threads (tree fitting)");
  ta.data.add_to(train_cmd);
  train_cmd->add_option("--n-estimators", ta.n_estimators, "Forest size");
  train_cmd->add_option("--min-samples-leaf", ta.min_samples_leaf,
                        "Leaf size floor");
  train_cmd->add_option("--layers", ta.layers, "Hidden layer count");
  train_cmd->add_option("--layer-size", ta.layer_size, "MLP layer width");
  train_cmd->add_option("--hidden-size", ta.hidden_size, "RNN hidden width");
  train_cmd->add_option("--dropout", ta.dropout, "Inter-layer dropout");
  train_cmd->add_option("--lr", ta.learning_rate, "Adam learning rate");

  // eval
  auto* eval_cmd = app.add_subcommand(
      "eval", "Score a model on the test split; optional vote curve");
  std::string ev_model, ev_manifest, ev_split, ev_kind = "br",
              ev_report = "report.json", ev_curve;
  std::vector<double> ev_lengths = {1, 2, 5, 10, 20, 30, 60, 120};
  std::vector<double> ev_offset;
  DataFlags ev_data;
  eval_cmd->add_option("--model", ev_model, "Trained model path")->required();
  eval_cmd->add_option("--manifest", ev_manifest, "Manifest path")
      ->required();
  eval_cmd->add_option("--split", ev_split, "Split CSV path")->required();
  eval_cmd->add_option("--kind", ev_kind, "Encoding: sr | br | brv")
      ->check(CLI::IsMember({"sr", "br", "brv"}));
  eval_cmd->add_option("--out", ev_report, "Report JSON path");
  eval_cmd->add_option("--vote-curve", ev_curve,
                       "Majority-vote curve CSV path");
  eval_cmd->add_option("--lengths", ev_lengths,
                       "Vote-curve sequence lengths in seconds");
  eval_cmd->add_option("--offset", ev_offset,
                       "Scene shift in meters: dx dz")
      ->expected(2);
  ev_data.add_to(eval_cmd);

  // hpo
  auto* hpo_cmd = app.add_subcommand(
      "hpo", "Two-stage hyperparameter search for one combination");
  std::string hp_family = "rf", hp_kind = "br", hp_manifest, hp_split,
              hp_log = "study.jsonl", hp_winner;
  int hp_stage = 1, hp_budget = 20, hp_jobs = 1, hp_epochs = 300;
  std::uint64_t hp_seed = 0;
  hpo_cmd
      ->add_option("--family", hp_family,
                   "Model family: rf | mlp | frnn | lstm | gru")
      ->check(CLI::IsMember({"rf", "mlp", "frnn", "lstm", "gru"}));
  hpo_cmd->add_option("--kind", hp_kind, "Encoding: sr | br | brv")
      ->check(CLI::IsMember({"sr", "br", "brv"}));
  hpo_cmd->add_option("--stage", hp_stage, "Search stage: 1 or 2")
      ->check(CLI::IsMember({1, 2}));
  hpo_cmd->add_option("--budget", hp_budget, "Stage-1 trial budget");
  hpo_cmd->add_option("--manifest", hp_manifest, "Manifest path")->required();
  hpo_cmd->add_option("--split", hp_split, "Split CSV path")->required();
  hpo_cmd->add_option("--log", hp_log, "Study log (JSONL, resumable)");
  hpo_cmd->add_option("--winner", hp_winner, "Winner config output path");
  hpo_cmd->add_option("--seed", hp_seed, "Search seed");
  hpo_cmd->add_option("--jobs", hp_jobs, "Worker threads");
  hpo_cmd->add_option("--epochs", hp_epochs, "Epoch cap per trial");

  // report
  auto* report_cmd = app.add_subcommand(
      "report", "Summarize eval reports into one accuracy table");
  std::vector<std::string> rep_entries;
  std::string rep_out;
  report_cmd
      ->add_option("--entry", rep_entries,
                   "label=path/to/report.json (repeatable)")
      ->required();
  report_cmd->add_option("--out", rep_out, "Summary output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // --help exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // any malformed invocation is a usage error
  }

  try {
    if (import_cmd->parsed()) {
      return cmd_import(resolve(bvh_dir), resolve(import_out), head, left,
                        right, unit_scale, axes, single_scene);
    }
    if (synth_cmd->parsed()) return cmd_synth(resolve(synth_out), synth);
    if (split_cmd->parsed()) {
      return cmd_split(resolve(split_manifest), resolve(split_out), policy);
    }
    if (encode_cmd->parsed()) {
      return cmd_encode(resolve(enc_manifest), resolve(enc_split), enc_kind,
                        resolve(enc_out));
    }
    if (train_cmd->parsed()) return cmd_train(*train_cmd, ta);
    if (eval_cmd->parsed()) {
      return cmd_eval(ev_model, ev_manifest, ev_split, ev_kind, ev_data,
                      ev_report, ev_curve, ev_lengths, ev_offset);
    }
    if (hpo_cmd->parsed()) {
      return cmd_hpo(hp_family, hp_kind, hp_stage, hp_budget, hp_manifest,
                     hp_split, hp_log, hp_winner, hp_seed, hp_jobs,
                     hp_epochs);
    }
    if (report_cmd->parsed()) return cmd_report(rep_entries, rep_out);
  } catch (const xrid::DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const xrid::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
