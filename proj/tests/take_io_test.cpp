#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "xrid/error.hpp"
#include "xrid/rng.hpp"
#include "xrid/take_io.hpp"

using namespace xrid;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("xrid_take_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

UnitQuaternion random_unit(Rng& rng) {
  UnitQuaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  return q.normalized();
}

Take random_take(Rng& rng, int frames) {
  Take take;
  take.subject_id = "s01";
  take.take_id = "t01";
  take.fps = 90.0;
  for (int i = 0; i < frames; ++i) {
    MotionFrame f;
    for (Pose* p : {&f.head, &f.wrist_left, &f.wrist_right}) {
      p->position = {rng.uniform(-3, 3), rng.uniform(0, 2),
                     rng.uniform(-3, 3)};
      p->rotation = random_unit(rng);
    }
    take.frames.push_back(f);
  }
  return take;
}

}  // namespace

TEST_CASE("take round-trips within 1e-9") {
  TempDir dir;
  Rng rng(21);
  const Take original = random_take(rng, 100);
  const std::string path = (dir.path / "take.csv").string();
  write_take(path, original);
  const Take loaded = read_take(path);

  CHECK(loaded.subject_id == original.subject_id);
  CHECK(loaded.take_id == original.take_id);
  CHECK(loaded.fps == doctest::Approx(original.fps));
  REQUIRE(loaded.frames.size() == original.frames.size());
  for (std::size_t i = 0; i < loaded.frames.size(); ++i) {
    const auto& a = loaded.frames[i];
    const auto& b = original.frames[i];
    CHECK(std::abs(a.head.position.x - b.head.position.x) < 1e-9);
    CHECK(std::abs(a.wrist_left.position.z - b.wrist_left.position.z) < 1e-9);
    CHECK(std::abs(a.wrist_right.rotation.w - b.wrist_right.rotation.w) <
          1e-9);
    CHECK(std::abs(a.head.rotation.x - b.head.rotation.x) < 1e-9);
  }
}

TEST_CASE("unexpected header column is named in the error") {
  TempDir dir;
  const std::string path = (dir.path / "bad.csv").string();
  std::string header(kTakeHeader);
  const auto pos = header.find("lw_px");
  header.replace(pos, 5, "LW_PX");
  std::ofstream(path) << header << "\n";
  try {
    (void)read_take(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("LW_PX") != std::string::npos);
  }
}

TEST_CASE("empty file is a data error") {
  TempDir dir;
  const std::string path = (dir.path / "empty.csv").string();
  std::ofstream{path};
  CHECK_THROWS_AS((void)read_take(path), DataError);
}

TEST_CASE("non-finite values are rejected") {
  TempDir dir;
  Rng rng(22);
  const Take take = random_take(rng, 2);
  const std::string path = (dir.path / "nan.csv").string();
  write_take(path, take);
  // Corrupt one value in place.
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  in.close();
  const auto line2 = text.find('\n', text.find('\n') + 1);
  const auto comma = text.find(',', line2);
  text.replace(comma + 1, text.find(',', comma + 1) - comma - 1, "nan");
  std::ofstream(path) << text;
  CHECK_THROWS_AS((void)read_take(path), DataError);
}

TEST_CASE("manifest round-trips") {
  TempDir dir;
  Manifest manifest;
  ManifestSubject s;
  s.subject_id = "s01";
  ManifestTake t;
  t.take_id = "t01";
  t.path = "s01_t01.csv";
  t.fps = 90.0;
  t.frame_count = 1234;
  t.two_subject_scene = false;
  t.session_id = "a";
  s.takes.push_back(t);
  manifest.subjects.push_back(s);

  const std::string path = (dir.path / "manifest.json").string();
  write_manifest(path, manifest);
  const Manifest loaded = read_manifest(path);
  REQUIRE(loaded.subjects.size() == 1);
  REQUIRE(loaded.subjects[0].takes.size() == 1);
  CHECK(loaded.subjects[0].subject_id == "s01");
  CHECK(loaded.subjects[0].takes[0].take_id == "t01");
  CHECK(loaded.subjects[0].takes[0].frame_count == 1234);
  CHECK(loaded.subjects[0].takes[0].two_subject_scene == false);
  CHECK(loaded.subjects[0].takes[0].session_id == "a");
}

TEST_CASE("atomic_write leaves no temp files and replaces content") {
  TempDir dir;
  const std::string path = (dir.path / "out.txt").string();
  atomic_write(path, "first");
  atomic_write(path, "second");
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text == "second");
  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir.path)) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
}
