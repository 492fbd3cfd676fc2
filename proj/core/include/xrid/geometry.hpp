#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace xrid {

/// Right-handed coordinates, +Y is world up. Quaternions are stored
/// (x, y, z, w) and composed with the Hamilton convention.
struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline constexpr Vec3 kUpAxis{0.0, 1.0, 0.0};

struct UnitQuaternion {
  double x = 0.0, y = 0.0, z = 0.0, w = 1.0;

  static UnitQuaternion identity() { return {}; }
  static UnitQuaternion from_axis_angle(const Vec3& axis, double radians);

  double norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }
  UnitQuaternion normalized() const;
  UnitQuaternion negated() const { return {-x, -y, -z, -w}; }
  double dot(const UnitQuaternion& o) const {
    return x * o.x + y * o.y + z * o.z + w * o.w;
  }
};

// Hamilton product, renormalized to bound drift over long takes.
UnitQuaternion quat_mul(const UnitQuaternion& a, const UnitQuaternion& b);

// Conjugate; the inverse for unit quaternions.
UnitQuaternion quat_inverse(const UnitQuaternion& q);

Vec3 rotate_vec(const UnitQuaternion& q, const Vec3& v);

// Sign-canonical representative of the rotation (w >= 0).
UnitQuaternion canonicalize(const UnitQuaternion& q);

struct SwingTwist {
  UnitQuaternion swing;
  UnitQuaternion twist;
};

/// Factors q = swing * twist where twist rotates about `axis` (unit length)
/// and swing has no component about it. Degenerate q (vector projection and
/// w both ~0) yields twist = identity.
SwingTwist swing_twist(const UnitQuaternion& q, const Vec3& axis);

struct Pose {
  Vec3 position;
  UnitQuaternion rotation;
};

struct MotionFrame {
  Pose head;
  Pose wrist_left;
  Pose wrist_right;
};

/// One continuous recording of one subject at a uniform frame rate.
struct Take {
  std::string subject_id;
  std::string take_id;
  double fps = 0.0;
  std::vector<MotionFrame> frames;

  double duration_seconds() const {
    return fps > 0.0 ? static_cast<double>(frames.size()) / fps : 0.0;
  }
};

}  // namespace xrid
