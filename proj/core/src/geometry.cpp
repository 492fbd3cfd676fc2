#include "xrid/geometry.hpp"

namespace xrid {

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis,
                                               double radians) {
  const double n = axis.norm();
  if (n == 0.0) return identity();
  const double s = std::sin(radians * 0.5) / n;
  return UnitQuaternion{axis.x * s, axis.y * s, axis.z * s,
                        std::cos(radians * 0.5)}
      .normalized();
}

UnitQuaternion UnitQuaternion::normalized() const {
  const double n = norm();
  if (n == 0.0) return identity();
  return {x / n, y / n, z / n, w / n};
}

UnitQuaternion quat_mul(const UnitQuaternion& a, const UnitQuaternion& b) {
  UnitQuaternion r{
      a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
      a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
      a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
      a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
  };
  return r.normalized();
}

UnitQuaternion quat_inverse(const UnitQuaternion& q) {
  return {-q.x, -q.y, -q.z, q.w};
}

Vec3 rotate_vec(const UnitQuaternion& q, const Vec3& v) {
  // v' = v + 2w (u x v) + 2 (u x (u x v)), u = vector part
  const Vec3 u{q.x, q.y, q.z};
  const Vec3 uv{u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z,
                u.x * v.y - u.y * v.x};
  const Vec3 uuv{u.y * uv.z - u.z * uv.y, u.z * uv.x - u.x * uv.z,
                 u.x * uv.y - u.y * uv.x};
  return {v.x + 2.0 * (q.w * uv.x + uuv.x), v.y + 2.0 * (q.w * uv.y + uuv.y),
          v.z + 2.0 * (q.w * uv.z + uuv.z)};
}

UnitQuaternion canonicalize(const UnitQuaternion& q) {
  return q.w < 0.0 ? q.negated() : q;
}

SwingTwist swing_twist(const UnitQuaternion& q, const Vec3& axis) {
  const Vec3 u{q.x, q.y, q.z};
  const double proj = u.dot(axis);
  UnitQuaternion twist{proj * axis.x, proj * axis.y, proj * axis.z, q.w};
  const double tn = twist.norm();
  if (tn < 1e-12) {
    // 180-degree rotation about an axis orthogonal to `axis`.
    return {q, UnitQuaternion::identity()};
  }
  twist = {twist.x / tn, twist.y / tn, twist.z / tn, twist.w / tn};
  const UnitQuaternion swing = quat_mul(q, quat_inverse(twist));
  return {swing, twist};
}

}  // namespace xrid
