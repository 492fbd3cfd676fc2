#pragma once

#include <string>
#include <vector>

#include "xrid/geometry.hpp"

namespace xrid {

/// Exact take-file CSV header (frame index plus 21 value columns).
extern const char kTakeHeader[];

/// Take files are CSV with header
///   frame,head_px,...,head_qw,lw_px,...,lw_qw,rw_px,...,rw_qw
/// (21 value columns), positions in meters, quaternions at 9+ significant
/// digits. Subject/take ids and fps live in a `<path>.meta.json` sidecar.
void write_take(const std::string& path, const Take& take);
Take read_take(const std::string& path);

struct ManifestTake {
  std::string take_id;
  std::string path;
  double fps = 0.0;
  std::size_t frame_count = 0;
  // Filter input; supplied at import time, trusted by the toolkit.
  bool two_subject_scene = true;
  std::string session_id;
};

struct ManifestSubject {
  std::string subject_id;
  std::vector<ManifestTake> takes;
};

struct Manifest {
  std::vector<ManifestSubject> subjects;
};

void write_manifest(const std::string& path, const Manifest& manifest);
Manifest read_manifest(const std::string& path);

/// Writes `contents` via a temp file + rename so partial output never
/// lands at `path`.
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace xrid
