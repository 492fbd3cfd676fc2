#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <set>

#include "xrid/error.hpp"
#include "xrid/hpo.hpp"

using namespace xrid;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("xrid_hpo_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("sampled configs respect the search ranges over 10000 draws") {
  Rng rng(101);
  for (int i = 0; i < 10000; ++i) {
    const auto rf = sample_config("rf", rng);
    CHECK(rf.at("n_estimators").get<int>() >= 50);
    CHECK(rf.at("n_estimators").get<int>() <= 1000);
    CHECK(rf.at("min_samples_leaf").get<int>() >= 1);
    CHECK(rf.at("min_samples_leaf").get<int>() <= 1000);

    const auto mlp = sample_config("mlp", rng);
    CHECK(mlp.at("layers").get<int>() >= 1);
    CHECK(mlp.at("layers").get<int>() <= 6);
    CHECK(mlp.at("layer_size").get<int>() >= 10);
    CHECK(mlp.at("layer_size").get<int>() <= 300);
    CHECK(mlp.at("learning_rate").get<double>() >= 1e-5);
    CHECK(mlp.at("learning_rate").get<double>() <= 1e-2);

    const auto rnn = sample_config("lstm", rng);
    CHECK(rnn.at("hidden_size").get<int>() >= 20);
    CHECK(rnn.at("hidden_size").get<int>() <= 200);
    CHECK(rnn.at("layers").get<int>() >= 1);
    CHECK(rnn.at("layers").get<int>() <= 8);
    CHECK(rnn.at("dropout").get<double>() >= 0.0);
    CHECK(rnn.at("dropout").get<double>() <= 0.6);
    CHECK(rnn.at("learning_rate").get<double>() >= 1e-4);
    CHECK(rnn.at("learning_rate").get<double>() <= 1e-2);
  }
}

TEST_CASE("stage-1 data fixture spans one second") {
  const DataParams rf = stage1_data_params("rf");
  CHECK(rf.mode == SampleMode::Binned);
  CHECK(rf.frames_per_bin == 90);
  const DataParams lstm = stage1_data_params("lstm");
  CHECK(lstm.mode == SampleMode::Windowed);
  CHECK(lstm.window_size == 30);
  CHECK(lstm.fps_target == 30.0);
  CHECK(lstm.sample_seconds() == doctest::Approx(1.0));
}

TEST_CASE("stage-2 grids have 8 binned and 12 windowed points") {
  CHECK(stage2_grid("rf").size() == 8);
  CHECK(stage2_grid("mlp").size() == 8);
  CHECK(stage2_grid("lstm").size() == 12);
  CHECK(stage2_grid("gru").size() == 12);
  // A 300-frame window at 10 fps spans 30 seconds.
  for (const DataParams& p : stage2_grid("frnn")) {
    if (p.window_size == 300 && p.fps_target == 10.0) {
      CHECK(p.sample_seconds() == doctest::Approx(30.0));
    }
  }
}

TEST_CASE("stage 1 logs trials and resumes without re-running them") {
  TempDir dir;
  const std::string log = (dir.path / "study.jsonl").string();
  Combination combo{"mlp", EncodingKind::BR};

  int calls = 0;
  const TrainEvalFn fn = [&](const nlohmann::json& config,
                             const DataParams&) {
    ++calls;
    return config.at("learning_rate").get<double>();
  };

  const StudyResult first = stage1(combo, 6, 42, fn, log);
  CHECK(calls == 6);
  REQUIRE(first.trials.size() == 6);
  CHECK(first.best_index >= 0);

  // Second run replays from the log.
  const StudyResult second = stage1(combo, 6, 42, fn, log);
  CHECK(calls == 6);
  REQUIRE(second.trials.size() == 6);
  for (int i = 0; i < 6; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    CHECK(second.trials[idx].objective == first.trials[idx].objective);
    CHECK(second.trials[idx].config == first.trials[idx].config);
  }
  CHECK(second.best_index == first.best_index);
}

TEST_CASE("failed trials are logged and skipped by selection") {
  TempDir dir;
  const std::string log = (dir.path / "study.jsonl").string();
  Combination combo{"rf", EncodingKind::BR};

  const TrainEvalFn fn = [&](const nlohmann::json& config,
                             const DataParams&) -> double {
    if (config.at("n_estimators").get<int>() % 2 == 0) {
      throw DataError("simulated failure");
    }
    return 0.5;
  };
  const StudyResult result = stage1(combo, 10, 1, fn, log);
  bool saw_failure = false;
  for (const auto& t : result.trials) {
    if (t.status == "failed") saw_failure = true;
  }
  CHECK(saw_failure);
  if (result.best_index >= 0) {
    CHECK(result.best().status == "completed");
  }
}

TEST_CASE("the earliest trial wins objective ties") {
  Combination combo{"rf", EncodingKind::BR};
  const TrainEvalFn fn = [](const nlohmann::json&, const DataParams&) {
    return 0.75;
  };
  const StudyResult result = stage1(combo, 5, 3, fn, "");
  CHECK(result.best_index == 0);
}

TEST_CASE("stage 2 runs the full grid with one architecture") {
  TempDir dir;
  const std::string log = (dir.path / "study.jsonl").string();
  Combination combo{"gru", EncodingKind::BRV};

  std::set<std::pair<double, int>> seen;
  const TrainEvalFn fn = [&](const nlohmann::json&, const DataParams& p) {
    seen.insert({p.fps_target, p.window_size});
    return 0.5;
  };
  const nlohmann::json config = {{"hidden_size", 64},
                                 {"layers", 2},
                                 {"dropout", 0.1},
                                 {"learning_rate", 1e-3}};
  const StudyResult result = stage2(combo, config, 5, fn, log);
  CHECK(result.trials.size() == 12);
  CHECK(seen.size() == 12);
  for (const auto& t : result.trials) {
    CHECK(t.config == config);
    CHECK(t.stage == "stage2");
  }
}

TEST_CASE("identical seeds draw identical trial configs") {
  Combination combo{"lstm", EncodingKind::BR};
  const TrainEvalFn fn = [](const nlohmann::json&, const DataParams&) {
    return 0.0;
  };
  const StudyResult a = stage1(combo, 4, 9, fn, "");
  const StudyResult b = stage1(combo, 4, 9, fn, "");
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.trials[i].config == b.trials[i].config);
    CHECK(a.trials[i].seed == b.trials[i].seed);
  }
}
