#include <doctest.h>

#include <unistd.h>

#include <filesystem>

#include "xrid/error.hpp"
#include "xrid/models/forest.hpp"
#include "xrid/models/model_io.hpp"
#include "xrid/models/train.hpp"
#include "xrid/rng.hpp"
#include "xrid/take_io.hpp"

using namespace xrid;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("xrid_model_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<BinnedSample> binned_blobs(Rng& rng, int per_class) {
  std::vector<BinnedSample> out;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < per_class; ++i) {
      BinnedSample s;
      s.subject_id = c == 0 ? "a" : "b";
      s.values = Eigen::VectorXd::NullaryExpr(
          6, [&](Eigen::Index) { return rng.normal(c * 2.0, 0.5); });
      out.push_back(s);
    }
  }
  return out;
}

std::vector<WindowedSample> windowed_blobs(Rng& rng, int per_class) {
  std::vector<WindowedSample> out;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < per_class; ++i) {
      WindowedSample s;
      s.subject_id = c == 0 ? "a" : "b";
      s.fps = 30.0;
      s.values = Eigen::MatrixXd::NullaryExpr(
          6, 4, [&](Eigen::Index, Eigen::Index) {
            return rng.normal(c * 1.5, 0.4);
          });
      out.push_back(s);
    }
  }
  return out;
}

void check_equal_predictions(const Classifier& a, const Classifier& b,
                             int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < 15; ++i) {
    const Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(
        rows, cols, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
    const Eigen::VectorXd pa = a.predict_proba(x);
    const Eigen::VectorXd pb = b.predict_proba(x);
    CHECK((pa - pb).cwiseAbs().maxCoeff() == 0.0);
  }
}

}  // namespace

TEST_CASE("random forest round-trips bitwise") {
  TempDir dir;
  Rng rng(81);
  RfConfig cfg;
  cfg.n_estimators = 50;
  cfg.seed = 1;
  const auto model = rf_fit(binned_blobs(rng, 30), {"a", "b"}, cfg);
  const std::string path = (dir.path / "rf.json").string();
  save_model(path, *model);
  const auto loaded = load_model(path);
  CHECK(loaded->family() == "rf");
  CHECK(loaded->classes() == model->classes());
  CHECK(loaded->sample_mode() == SampleMode::Binned);
  check_equal_predictions(*model, *loaded, 1, 6, 2);
}

TEST_CASE("mlp round-trips bitwise") {
  TempDir dir;
  Rng rng(82);
  MlpConfig cfg;
  cfg.layers = 2;
  cfg.layer_size = 12;
  cfg.seed = 3;
  TrainConfig tc;
  tc.max_epochs = 5;
  tc.seed = 4;
  const auto model =
      mlp_fit(binned_blobs(rng, 25), binned_blobs(rng, 8), {"a", "b"}, cfg,
              tc);
  const std::string path = (dir.path / "mlp.json").string();
  save_model(path, *model);
  const auto loaded = load_model(path);
  CHECK(loaded->family() == "mlp");
  CHECK(loaded->snapshot().val_mean_acc ==
        model->snapshot().val_mean_acc);
  check_equal_predictions(*model, *loaded, 1, 6, 5);
}

TEST_CASE("lstm round-trips bitwise") {
  TempDir dir;
  Rng rng(83);
  RnnConfig cfg;
  cfg.kind = RnnKind::LSTM;
  cfg.hidden_size = 20;
  cfg.layers = 2;
  cfg.seed = 6;
  TrainConfig tc;
  tc.max_epochs = 3;
  tc.seed = 7;
  const auto model = rnn_fit(windowed_blobs(rng, 20), windowed_blobs(rng, 6),
                             {"a", "b"}, cfg, tc);
  const std::string path = (dir.path / "lstm.json").string();
  save_model(path, *model);
  const auto loaded = load_model(path);
  CHECK(loaded->family() == "lstm");
  CHECK(loaded->sample_mode() == SampleMode::Windowed);
  check_equal_predictions(*model, *loaded, 6, 4, 8);
}

TEST_CASE("loading garbage is a data error") {
  TempDir dir;
  const std::string path = (dir.path / "junk.json").string();
  atomic_write(path, "{\"version\": 99}\n");
  CHECK_THROWS_AS((void)load_model(path), DataError);
  CHECK_THROWS_AS((void)load_model((dir.path / "missing.json").string()),
                  DataError);
}
