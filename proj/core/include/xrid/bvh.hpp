#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "xrid/geometry.hpp"

namespace xrid {

enum class BvhChannel {
  Xposition,
  Yposition,
  Zposition,
  Xrotation,
  Yrotation,
  Zrotation,
};

struct BvhJoint {
  std::string name;
  Vec3 offset;  // file units
  std::vector<BvhChannel> channels;
  std::vector<BvhJoint> children;
  bool is_end_site = false;
};

struct BvhClip {
  BvhJoint root;
  double frame_time = 0.0;  // seconds
  // One row per frame, row width = total channel count in hierarchy order.
  std::vector<std::vector<double>> frames;

  std::size_t channel_count() const;
};

/// Parses the HIERARCHY/MOTION subset of BVH. Rotation channel order is
/// preserved exactly as declared. Throws DataError with a line number on
/// malformed input.
BvhClip parse_bvh(std::istream& in);
BvhClip parse_bvh_file(const std::string& path);

/// World pose of every joint at one frame. Local rotations compose the
/// elemental Euler rotations intrinsically in declared channel order.
std::map<std::string, Pose> forward_kinematics(const BvhClip& clip,
                                               std::size_t frame_index);

/// Optional axis remap applied at extraction, e.g. for Z-up sources.
/// target = sign * source[axis], expressed as a permutation string like
/// "xyz" (identity) or "x-zy". Must denote a right-handed frame for
/// rotations to remain valid.
struct AxisMap {
  int perm[3] = {0, 1, 2};
  double sign[3] = {1.0, 1.0, 1.0};

  static AxisMap identity() { return {}; }
  static AxisMap parse(const std::string& spec);  // throws DataError
  Vec3 apply(const Vec3& v) const;
  UnitQuaternion apply(const UnitQuaternion& q) const;
};

/// Extracts the head and wrist joints into a canonical Take. Positions are
/// scaled by unit_scale into meters (0.01 for centimeter files). Quaternions
/// are canonicalized and made temporally hemisphere-continuous.
Take extract_three_point(const BvhClip& clip, const std::string& head_name,
                         const std::string& left_name,
                         const std::string& right_name, double unit_scale,
                         const AxisMap& axes = AxisMap::identity());

}  // namespace xrid
