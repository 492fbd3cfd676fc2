#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "xrid/geometry.hpp"

namespace xrid {

enum class EncodingKind { SR, BR, BRV };

inline int feature_width(EncodingKind k) {
  return k == EncodingKind::SR ? 21 : 18;
}

std::string to_string(EncodingKind k);
EncodingKind encoding_from_string(const std::string& s);  // throws DataError

/// Per-frame encoded rows. Column layout:
///   SR : head(px py pz qx qy qz qw), wrist-left(7), wrist-right(7)
///   BR : wrist-left(7), wrist-right(7), head residual quat(4)
///   BRV: same groups as BR, holding frame-to-frame deltas
struct FeatureSequence {
  std::string subject_id;
  std::string take_id;
  EncodingKind kind = EncodingKind::SR;
  double fps = 0.0;
  Eigen::MatrixXd rows;  // T x width

  std::vector<std::string> column_names() const;
};

FeatureSequence encode_sr(const Take& take);

/// Wrist poses mapped into the heading frame (head position + yaw-only
/// twist of the head rotation about up_axis); head residual is the swing.
FeatureSequence encode_br(const Take& take, const Vec3& up_axis = kUpAxis,
                          bool full_head_frame = false);

/// First difference of BR: positional deltas and relative rotations
/// delta = q_t * inverse(q_{t-1}), canonicalized. T-1 rows.
FeatureSequence encode_brv(const Take& take, const Vec3& up_axis = kUpAxis,
                           bool full_head_frame = false);

FeatureSequence encode(const Take& take, EncodingKind kind,
                       const Vec3& up_axis = kUpAxis);

void write_feature_sequence(const std::string& path,
                            const FeatureSequence& seq);

}  // namespace xrid
