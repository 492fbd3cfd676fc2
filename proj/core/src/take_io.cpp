#include "xrid/take_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xrid/error.hpp"

namespace xrid {

const char kTakeHeader[] =
    "frame,head_px,head_py,head_pz,head_qx,head_qy,head_qz,head_qw,"
    "lw_px,lw_py,lw_pz,lw_qx,lw_qy,lw_qz,lw_qw,"
    "rw_px,rw_py,rw_pz,rw_qx,rw_qy,rw_qz,rw_qw";

namespace {

using nlohmann::json;

void append_pose(std::string& out, const Pose& p) {
  char buf[32];
  for (double v : {p.position.x, p.position.y, p.position.z, p.rotation.x,
                   p.rotation.y, p.rotation.z, p.rotation.w}) {
    std::snprintf(buf, sizeof(buf), ",%.12g", v);
    out += buf;
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_value(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw DataError("take file line " + std::to_string(line_no) +
                    ": bad value '" + s + "'");
  }
  if (!std::isfinite(v)) {
    throw DataError("take file line " + std::to_string(line_no) +
                    ": non-finite value");
  }
  return v;
}

}  // namespace

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + tmp);
    out.write(contents.data(),
              static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_take(const std::string& path, const Take& take) {
  std::string body = kTakeHeader;
  body += '\n';
  for (std::size_t i = 0; i < take.frames.size(); ++i) {
    body += std::to_string(i);
    append_pose(body, take.frames[i].head);
    append_pose(body, take.frames[i].wrist_left);
    append_pose(body, take.frames[i].wrist_right);
    body += '\n';
  }
  atomic_write(path, body);

  json meta = {{"subject_id", take.subject_id},
               {"take_id", take.take_id},
               {"fps", take.fps},
               {"frame_count", take.frames.size()}};
  atomic_write(path + ".meta.json", meta.dump(2) + "\n");
}

Take read_take(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open take file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty take file: " + path);
  {
    const auto got = split_csv(line);
    const auto want = split_csv(kTakeHeader);
    if (got.size() != want.size()) {
      throw DataError("take file header has " + std::to_string(got.size()) +
                      " columns, expected " + std::to_string(want.size()));
    }
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (got[i] != want[i]) {
        throw DataError("take file header: unexpected column '" + got[i] +
                        "' (expected '" + want[i] + "')");
      }
    }
  }

  Take take;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cols = split_csv(line);
    if (cols.size() != 22) {
      throw DataError("take file line " + std::to_string(line_no) + ": " +
                      std::to_string(cols.size()) + " columns, expected 22");
    }
    double v[21];
    for (int i = 0; i < 21; ++i) v[i] = parse_value(cols[i + 1], line_no);
    MotionFrame f;
    auto pose = [&](int base) {
      return Pose{{v[base], v[base + 1], v[base + 2]},
                  {v[base + 3], v[base + 4], v[base + 5], v[base + 6]}};
    };
    f.head = pose(0);
    f.wrist_left = pose(7);
    f.wrist_right = pose(14);
    take.frames.push_back(f);
  }
  if (take.frames.empty()) throw DataError("take file has no frames: " + path);

  std::ifstream meta_in(path + ".meta.json");
  if (!meta_in) throw DataError("missing sidecar: " + path + ".meta.json");
  json meta = json::parse(meta_in);
  take.subject_id = meta.at("subject_id").get<std::string>();
  take.take_id = meta.at("take_id").get<std::string>();
  take.fps = meta.at("fps").get<double>();
  if (take.fps <= 0.0) throw DataError("sidecar fps must be positive");
  return take;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  json subjects = json::array();
  for (const auto& s : manifest.subjects) {
    json takes = json::array();
    for (const auto& t : s.takes) {
      takes.push_back({{"take_id", t.take_id},
                       {"path", t.path},
                       {"fps", t.fps},
                       {"frame_count", t.frame_count},
                       {"two_subject_scene", t.two_subject_scene},
                       {"session_id", t.session_id}});
    }
    subjects.push_back({{"subject_id", s.subject_id}, {"takes", takes}});
  }
  atomic_write(path, json{{"version", 1}, {"subjects", subjects}}.dump(2) + "\n");
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  json doc = json::parse(in);
  Manifest m;
  for (const auto& s : doc.at("subjects")) {
    ManifestSubject subject;
    subject.subject_id = s.at("subject_id").get<std::string>();
    for (const auto& t : s.at("takes")) {
      ManifestTake take;
      take.take_id = t.at("take_id").get<std::string>();
      take.path = t.at("path").get<std::string>();
      take.fps = t.at("fps").get<double>();
      take.frame_count = t.at("frame_count").get<std::size_t>();
      take.two_subject_scene = t.value("two_subject_scene", true);
      take.session_id = t.value("session_id", std::string());
      subject.takes.push_back(std::move(take));
    }
    m.subjects.push_back(std::move(subject));
  }
  return m;
}

}  // namespace xrid
