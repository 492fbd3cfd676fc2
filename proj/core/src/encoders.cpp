#include "xrid/encoders.hpp"

#include <cstdio>

#include "xrid/error.hpp"
#include "xrid/take_io.hpp"

namespace xrid {

namespace {

void put_pose(Eigen::MatrixXd& rows, Eigen::Index t, int base, const Pose& p) {
  rows(t, base + 0) = p.position.x;
  rows(t, base + 1) = p.position.y;
  rows(t, base + 2) = p.position.z;
  rows(t, base + 3) = p.rotation.x;
  rows(t, base + 4) = p.rotation.y;
  rows(t, base + 5) = p.rotation.z;
  rows(t, base + 6) = p.rotation.w;
}

void put_quat(Eigen::MatrixXd& rows, Eigen::Index t, int base,
              const UnitQuaternion& q) {
  rows(t, base + 0) = q.x;
  rows(t, base + 1) = q.y;
  rows(t, base + 2) = q.z;
  rows(t, base + 3) = q.w;
}

struct BrFrame {
  Pose wrist_left;
  Pose wrist_right;
  UnitQuaternion head_residual;
};

BrFrame br_frame(const MotionFrame& f, const Vec3& up_axis,
                 bool full_head_frame) {
  UnitQuaternion heading;
  if (full_head_frame) {
    heading = f.head.rotation;
  } else {
    heading = swing_twist(f.head.rotation, up_axis).twist;
  }
  const UnitQuaternion inv = quat_inverse(heading);
  auto to_br = [&](const Pose& p) {
    Pose out;
    out.position = rotate_vec(inv, p.position - f.head.position);
    out.rotation = canonicalize(quat_mul(inv, p.rotation));
    return out;
  };
  BrFrame out;
  out.wrist_left = to_br(f.wrist_left);
  out.wrist_right = to_br(f.wrist_right);
  // Head rotation expressed in the heading frame; invariant to scene yaw
  // (the raw swing is not: conjugation by the yaw moves its axis).
  out.head_residual = canonicalize(quat_mul(inv, f.head.rotation));
  return out;
}

void check_take(const Take& take, std::size_t min_frames) {
  if (take.frames.size() < min_frames) {
    throw DataError("take '" + take.take_id + "' has " +
                    std::to_string(take.frames.size()) +
                    " frames, need at least " + std::to_string(min_frames));
  }
}

}  // namespace

std::string to_string(EncodingKind k) {
  switch (k) {
    case EncodingKind::SR:
      return "sr";
    case EncodingKind::BR:
      return "br";
    case EncodingKind::BRV:
      return "brv";
  }
  return "?";
}

EncodingKind encoding_from_string(const std::string& s) {
  if (s == "sr" || s == "SR") return EncodingKind::SR;
  if (s == "br" || s == "BR") return EncodingKind::BR;
  if (s == "brv" || s == "BRV") return EncodingKind::BRV;
  throw DataError("unknown encoding '" + s + "' (expected sr, br or brv)");
}

std::vector<std::string> FeatureSequence::column_names() const {
  static const char* comps[] = {"px", "py", "pz", "qx", "qy", "qz", "qw"};
  std::vector<std::string> names;
  auto device = [&](const std::string& prefix, int n) {
    for (int i = 0; i < n; ++i) names.push_back(prefix + "_" + comps[i]);
  };
  if (kind == EncodingKind::SR) {
    device("head", 7);
    device("lw", 7);
    device("rw", 7);
  } else {
    device("lw", 7);
    device("rw", 7);
    for (int i = 3; i < 7; ++i)
      names.push_back(std::string("head_") + comps[i]);
  }
  return names;
}

FeatureSequence encode_sr(const Take& take) {
  check_take(take, 1);
  FeatureSequence seq;
  seq.subject_id = take.subject_id;
  seq.take_id = take.take_id;
  seq.kind = EncodingKind::SR;
  seq.fps = take.fps;
  seq.rows.resize(static_cast<Eigen::Index>(take.frames.size()), 21);
  for (Eigen::Index t = 0; t < seq.rows.rows(); ++t) {
    const MotionFrame& f = take.frames[static_cast<std::size_t>(t)];
    auto canon = [](Pose p) {
      p.rotation = canonicalize(p.rotation);
      return p;
    };
    put_pose(seq.rows, t, 0, canon(f.head));
    put_pose(seq.rows, t, 7, canon(f.wrist_left));
    put_pose(seq.rows, t, 14, canon(f.wrist_right));
  }
  return seq;
}

FeatureSequence encode_br(const Take& take, const Vec3& up_axis,
                          bool full_head_frame) {
  check_take(take, 1);
  FeatureSequence seq;
  seq.subject_id = take.subject_id;
  seq.take_id = take.take_id;
  seq.kind = EncodingKind::BR;
  seq.fps = take.fps;
  seq.rows.resize(static_cast<Eigen::Index>(take.frames.size()), 18);
  for (Eigen::Index t = 0; t < seq.rows.rows(); ++t) {
    const BrFrame f = br_frame(take.frames[static_cast<std::size_t>(t)],
                               up_axis, full_head_frame);
    put_pose(seq.rows, t, 0, f.wrist_left);
    put_pose(seq.rows, t, 7, f.wrist_right);
    put_quat(seq.rows, t, 14, f.head_residual);
  }
  return seq;
}

FeatureSequence encode_brv(const Take& take, const Vec3& up_axis,
                           bool full_head_frame) {
  check_take(take, 2);
  const FeatureSequence br = encode_br(take, up_axis, full_head_frame);
  FeatureSequence seq;
  seq.subject_id = take.subject_id;
  seq.take_id = take.take_id;
  seq.kind = EncodingKind::BRV;
  seq.fps = take.fps;
  const Eigen::Index T = br.rows.rows();
  seq.rows.resize(T - 1, 18);

  auto quat_at = [&](Eigen::Index t, int base) {
    return UnitQuaternion{br.rows(t, base), br.rows(t, base + 1),
                          br.rows(t, base + 2), br.rows(t, base + 3)};
  };
  for (Eigen::Index t = 1; t < T; ++t) {
    for (int base : {0, 7}) {  // positional deltas
      for (int i = 0; i < 3; ++i) {
        seq.rows(t - 1, base + i) =
            br.rows(t, base + i) - br.rows(t - 1, base + i);
      }
    }
    for (int base : {3, 10, 14}) {  // relative rotations
      const UnitQuaternion d = canonicalize(
          quat_mul(quat_at(t, base), quat_inverse(quat_at(t - 1, base))));
      put_quat(seq.rows, t - 1, base, d);
    }
  }
  return seq;
}

FeatureSequence encode(const Take& take, EncodingKind kind,
                       const Vec3& up_axis) {
  switch (kind) {
    case EncodingKind::SR:
      return encode_sr(take);
    case EncodingKind::BR:
      return encode_br(take, up_axis);
    case EncodingKind::BRV:
      return encode_brv(take, up_axis);
  }
  throw DataError("bad encoding kind");
}

void write_feature_sequence(const std::string& path,
                            const FeatureSequence& seq) {
  std::string body = "frame";
  for (const auto& n : seq.column_names()) {
    body += ',';
    body += n;
  }
  body += '\n';
  char buf[32];
  for (Eigen::Index t = 0; t < seq.rows.rows(); ++t) {
    body += std::to_string(t);
    for (Eigen::Index c = 0; c < seq.rows.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), ",%.12g", seq.rows(t, c));
      body += buf;
    }
    body += '\n';
  }
  atomic_write(path, body);
}

}  // namespace xrid
