#include "xrid/hpo.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "xrid/error.hpp"

namespace xrid {

namespace {

using nlohmann::json;

bool is_recurrent_family(const std::string& family) {
  return family == "frnn" || family == "lstm" || family == "gru";
}

json trial_to_json(const Trial& t, const Combination& c) {
  json data;
  if (t.data.mode == SampleMode::Binned) {
    data = {{"mode", "binned"}, {"frames_per_bin", t.data.frames_per_bin}};
  } else {
    data = {{"mode", "windowed"},
            {"fps_target", t.data.fps_target},
            {"window_size", t.data.window_size}};
  }
  return {{"index", t.index},     {"stage", t.stage},
          {"combination", c.tag()}, {"config", t.config},
          {"data", data},         {"objective", t.objective},
          {"status", t.status},   {"seed", t.seed},
          {"seconds", t.seconds}};
}

Trial trial_from_json(const json& j) {
  Trial t;
  t.index = j.at("index").get<int>();
  t.stage = j.at("stage").get<std::string>();
  t.config = j.at("config");
  const json& data = j.at("data");
  if (data.at("mode").get<std::string>() == "binned") {
    t.data.mode = SampleMode::Binned;
    t.data.frames_per_bin = data.at("frames_per_bin").get<int>();
  } else {
    t.data.mode = SampleMode::Windowed;
    t.data.fps_target = data.at("fps_target").get<double>();
    t.data.window_size = data.at("window_size").get<int>();
  }
  t.objective = j.at("objective").get<double>();
  t.status = j.at("status").get<std::string>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.seconds = j.at("seconds").get<double>();
  return t;
}

// Completed trials from a previous run, keyed by (stage, index).
std::vector<Trial> load_log(const std::string& path, const std::string& stage,
                            const std::string& tag) {
  std::vector<Trial> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    if (j.value("stage", "") != stage) continue;
    if (j.value("combination", "") != tag) continue;
    out.push_back(trial_from_json(j));
  }
  return out;
}

void append_log(const std::string& path, const json& record) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::app);
  if (!out) throw DataError("cannot append to study log: " + path);
  out << record.dump() << "\n";
}

Trial run_trial(int index, const std::string& stage, const Combination& c,
                json config, const DataParams& data, std::uint64_t seed,
                const TrainEvalFn& train_eval, const std::string& log_path) {
  Trial t;
  t.index = index;
  t.stage = stage;
  t.config = std::move(config);
  t.data = data;
  t.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    t.objective = train_eval(t.config, t.data);
    t.status = "completed";
  } catch (const std::exception& e) {
    t.objective = -std::numeric_limits<double>::infinity();
    t.status = "failed";
    t.config["error"] = e.what();
  }
  t.seconds = std::chrono::duration<double>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  append_log(log_path, trial_to_json(t, c));
  return t;
}

void select_best(StudyResult& result) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const Trial& t = result.trials[i];
    if (t.status == "completed" && t.objective > best) {
      best = t.objective;
      result.best_index = static_cast<int>(i);
    }
  }
}

}  // namespace

const Trial& StudyResult::best() const {
  if (best_index < 0) throw DataError("study has no completed trials");
  return trials[static_cast<std::size_t>(best_index)];
}

json sample_config(const std::string& family, Rng& rng) {
  if (family == "rf") {
    return {{"n_estimators", rng.uniform_int(50, 1000)},
            {"min_samples_leaf", rng.uniform_int(1, 1000)}};
  }
  if (family == "mlp") {
    return {{"layers", rng.uniform_int(1, 6)},
            {"layer_size", rng.uniform_int(10, 300)},
            {"learning_rate", rng.log_uniform(1e-5, 1e-2)}};
  }
  if (is_recurrent_family(family)) {
    return {{"hidden_size", rng.uniform_int(20, 200)},
            {"layers", rng.uniform_int(1, 8)},
            {"dropout", rng.uniform(0.0, 0.6)},
            {"learning_rate", rng.log_uniform(1e-4, 1e-2)}};
  }
  throw DataError("unknown family '" + family + "'");
}

DataParams stage1_data_params(const std::string& family) {
  DataParams p;
  if (is_recurrent_family(family)) {
    p.mode = SampleMode::Windowed;
    p.window_size = 30;
    p.fps_target = 30.0;
  } else {
    p.mode = SampleMode::Binned;
    p.frames_per_bin = 90;
  }
  return p;
}

std::vector<DataParams> stage2_grid(const std::string& family) {
  std::vector<DataParams> grid;
  if (is_recurrent_family(family)) {
    for (double fps : {10.0, 30.0, 60.0, 90.0}) {
      for (int window : {10, 100, 300}) {
        DataParams p;
        p.mode = SampleMode::Windowed;
        p.fps_target = fps;
        p.window_size = window;
        grid.push_back(p);
      }
    }
  } else {
    for (int fpb : {10, 30, 90, 180, 450, 700, 900, 1350}) {
      DataParams p;
      p.mode = SampleMode::Binned;
      p.frames_per_bin = fpb;
      grid.push_back(p);
    }
  }
  return grid;
}

StudyResult stage1(const Combination& combination, int budget,
                   std::uint64_t seed, const TrainEvalFn& train_eval,
                   const std::string& log_path) {
  if (budget < 1) throw DataError("stage1 budget must be >= 1");
  const DataParams data = stage1_data_params(combination.family);
  const std::vector<Trial> previous =
      log_path.empty() ? std::vector<Trial>{}
                       : load_log(log_path, "stage1", combination.tag());

  StudyResult result;
  for (int i = 0; i < budget; ++i) {
    // Per-trial seed stream: a resumed study reproduces configs exactly.
    const std::uint64_t trial_seed =
        derive_seed(seed, "hpo-" + combination.tag(),
                    static_cast<std::uint64_t>(i));
    Rng rng(trial_seed);
    json config = sample_config(combination.family, rng);

    const auto done = std::find_if(
        previous.begin(), previous.end(), [&](const Trial& t) {
          return t.index == i && t.status == "completed";
        });
    if (done != previous.end()) {
      result.trials.push_back(*done);
      continue;
    }
    result.trials.push_back(run_trial(i, "stage1", combination,
                                      std::move(config), data, trial_seed,
                                      train_eval, log_path));
  }
  select_best(result);
  return result;
}

StudyResult stage2(const Combination& combination,
                   const nlohmann::json& best_config, std::uint64_t seed,
                   const TrainEvalFn& train_eval,
                   const std::string& log_path) {
  const std::vector<DataParams> grid = stage2_grid(combination.family);
  const std::vector<Trial> previous =
      log_path.empty() ? std::vector<Trial>{}
                       : load_log(log_path, "stage2", combination.tag());

  StudyResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::uint64_t trial_seed =
        derive_seed(seed, "hpo2-" + combination.tag(),
                    static_cast<std::uint64_t>(i));
    const auto done = std::find_if(
        previous.begin(), previous.end(), [&](const Trial& t) {
          return t.index == static_cast<int>(i) && t.status == "completed";
        });
    if (done != previous.end()) {
      result.trials.push_back(*done);
      continue;
    }
    result.trials.push_back(run_trial(static_cast<int>(i), "stage2",
                                      combination, best_config, grid[i],
                                      trial_seed, train_eval, log_path));
  }
  select_best(result);
  return result;
}

}  // namespace xrid
