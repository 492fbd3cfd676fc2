#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("xrid_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd =
      XRID_CLI_PATH + (" " + args) + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in),
          std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("no arguments is a usage error") {
  CHECK(run("") == 1);
  CHECK(run("no-such-command") == 1);
}

TEST_CASE("missing input files are data errors") {
  TempDir dir;
  CHECK(run("split --manifest " + (dir.path / "nope.json").string() +
            " --out " + (dir.path / "s.csv").string()) == 2);
}

TEST_CASE("out-of-range hyperparameters are rejected") {
  TempDir dir;
  const std::string data = (dir.path / "data").string();
  REQUIRE(run("synth --out " + data +
              " --subjects 3 --takes 3 --seconds 20 --fps 30 --seed 1") == 0);
  const std::string split = (dir.path / "split.csv").string();
  REQUIRE(run("split --manifest " + data + "/manifest.json --out " + split +
              " --min-seconds 5") == 0);
  // Dropout above 0.6 violates the documented range.
  CHECK(run("train --manifest " + data + "/manifest.json --split " + split +
            " --family lstm --kind brv --mode windowed --fps-target 30"
            " --window-size 10 --dropout 0.9 --epochs 1 --out " +
            (dir.path / "m.json").string()) == 2);
}

TEST_CASE("synth then split then encode is reproducible byte for byte") {
  TempDir dir;
  const std::string a = (dir.path / "a").string();
  const std::string b = (dir.path / "b").string();
  const std::string args =
      " --subjects 2 --takes 3 --seconds 15 --fps 30 --seed 11";
  REQUIRE(run("synth --out " + a + args) == 0);
  REQUIRE(run("synth --out " + b + args) == 0);
  for (const auto& entry : fs::directory_iterator(a)) {
    const fs::path other = fs::path(b) / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
  }

  const std::string split = (dir.path / "split.csv").string();
  REQUIRE(run("split --manifest " + a + "/manifest.json --out " + split +
              " --min-seconds 5") == 0);
  const std::string feats = (dir.path / "features").string();
  REQUIRE(run("encode --manifest " + a + "/manifest.json --split " + split +
              " --kind br --out " + feats) == 0);
  int count = 0;
  for (const auto& entry : fs::directory_iterator(feats)) {
    (void)entry;
    ++count;
  }
  CHECK(count == 6);  // 2 subjects x 3 takes
}

TEST_CASE("config file values apply and flags override them") {
  TempDir dir;
  const std::string data = (dir.path / "data").string();
  REQUIRE(run("synth --out " + data +
              " --subjects 2 --takes 3 --seconds 20 --fps 30 --seed 2") == 0);
  const std::string split = (dir.path / "split.csv").string();
  REQUIRE(run("split --manifest " + data + "/manifest.json --out " + split +
              " --min-seconds 5") == 0);

  const fs::path cfg = dir.path / "run.json";
  std::ofstream(cfg) << R"({
    "version": 1,
    "manifest": ")" << data << R"(/manifest.json",
    "split": ")" << split << R"(",
    "kind": "br",
    "family": "rf",
    "frames_per_bin": 30,
    "model": {"n_estimators": 50, "min_samples_leaf": 1}
  })";
  const std::string model = (dir.path / "model.json").string();
  CHECK(run("train --config " + cfg.string() + " --out " + model) == 0);
  CHECK(fs::exists(model));

  // A config without a version field is rejected.
  const fs::path bad = dir.path / "bad.json";
  std::ofstream(bad) << R"({"family": "rf"})";
  CHECK(run("train --config " + bad.string()) == 2);
}

TEST_CASE("eval writes a report and respects --offset") {
  TempDir dir;
  const std::string data = (dir.path / "data").string();
  REQUIRE(run("synth --out " + data +
              " --subjects 3 --takes 3 --seconds 20 --fps 30 --seed 4") == 0);
  const std::string split = (dir.path / "split.csv").string();
  REQUIRE(run("split --manifest " + data + "/manifest.json --out " + split +
              " --min-seconds 5") == 0);
  const std::string model = (dir.path / "rf.json").string();
  REQUIRE(run("train --manifest " + data + "/manifest.json --split " + split +
              " --family rf --kind br --frames-per-bin 30"
              " --n-estimators 50 --out " +
              model) == 0);

  const std::string rep = (dir.path / "report.json").string();
  const std::string rep_off = (dir.path / "report_off.json").string();
  REQUIRE(run("eval --model " + model + " --manifest " + data +
              "/manifest.json --split " + split +
              " --kind br --frames-per-bin 30 --out " + rep) == 0);
  REQUIRE(run("eval --model " + model + " --manifest " + data +
              "/manifest.json --split " + split +
              " --kind br --frames-per-bin 30 --offset 0.5 0.5 --out " +
              rep_off) == 0);
  // BR features ignore scene position: identical reports.
  CHECK(slurp(rep) == slurp(rep_off));

  const std::string summary = (dir.path / "summary.md").string();
  CHECK(run("report --entry br=" + rep + " --out " + summary) == 0);
  CHECK(slurp(summary).find("br") != std::string::npos);
}
