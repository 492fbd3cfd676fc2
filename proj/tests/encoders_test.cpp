#include <doctest.h>

#include <cmath>

#include "xrid/encoders.hpp"
#include "xrid/geometry.hpp"
#include "xrid/rng.hpp"

using namespace xrid;

namespace {

UnitQuaternion random_unit(Rng& rng) {
  UnitQuaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  return q.normalized();
}

Take random_take(Rng& rng, int frames) {
  Take take;
  take.subject_id = "s";
  take.take_id = "t";
  take.fps = 90.0;
  UnitQuaternion prev = UnitQuaternion::identity();
  for (int i = 0; i < frames; ++i) {
    MotionFrame f;
    for (Pose* p : {&f.head, &f.wrist_left, &f.wrist_right}) {
      p->position = {rng.uniform(-2, 2), rng.uniform(0.5, 2),
                     rng.uniform(-2, 2)};
      p->rotation = random_unit(rng);
    }
    take.frames.push_back(f);
  }
  return take;
}

// Rigid scene motion: yaw about the world origin plus horizontal shift.
Take transform_take(const Take& take, double yaw, double dx, double dz) {
  const UnitQuaternion r = UnitQuaternion::from_axis_angle(kUpAxis, yaw);
  Take out = take;
  for (MotionFrame& f : out.frames) {
    for (Pose* p : {&f.head, &f.wrist_left, &f.wrist_right}) {
      p->position = rotate_vec(r, p->position) + Vec3{dx, 0.0, dz};
      p->rotation = quat_mul(r, p->rotation);
    }
  }
  return out;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("feature widths are 21 / 18 / 18") {
  CHECK(feature_width(EncodingKind::SR) == 21);
  CHECK(feature_width(EncodingKind::BR) == 18);
  CHECK(feature_width(EncodingKind::BRV) == 18);

  Rng rng(31);
  const Take take = random_take(rng, 10);
  CHECK(encode_sr(take).rows.cols() == 21);
  CHECK(encode_br(take).rows.cols() == 18);
  CHECK(encode_brv(take).rows.cols() == 18);
  CHECK(encode_sr(take).rows.rows() == 10);
  CHECK(encode_br(take).rows.rows() == 10);
  CHECK(encode_brv(take).rows.rows() == 9);
}

TEST_CASE("column names match widths") {
  Rng rng(32);
  const Take take = random_take(rng, 3);
  for (EncodingKind kind :
       {EncodingKind::SR, EncodingKind::BR, EncodingKind::BRV}) {
    const FeatureSequence seq = encode(take, kind);
    CHECK(static_cast<int>(seq.column_names().size()) ==
          feature_width(kind));
  }
}

TEST_CASE("BR is invariant to a 90-degree yaw about the scene origin") {
  Rng rng(33);
  const Take take = random_take(rng, 50);
  const Take turned = transform_take(take, M_PI / 2.0, 0.0, 0.0);
  CHECK(max_abs_diff(encode_br(take).rows, encode_br(turned).rows) < 1e-6);
}

TEST_CASE("BR and BRV are invariant to rigid scene transforms, SR is not") {
  Rng rng(34);
  for (int trial = 0; trial < 25; ++trial) {
    const Take take = random_take(rng, 40);
    const double yaw = rng.uniform(-M_PI, M_PI);
    const double dx = rng.uniform(-10, 10);
    const double dz = rng.uniform(-10, 10);
    const Take moved = transform_take(take, yaw, dx, dz);

    CHECK(max_abs_diff(encode_br(take).rows, encode_br(moved).rows) < 1e-6);
    CHECK(max_abs_diff(encode_brv(take).rows, encode_brv(moved).rows) <
          1e-6);
    if (std::abs(dx) > 0.1 || std::abs(dz) > 0.1) {
      CHECK(max_abs_diff(encode_sr(take).rows, encode_sr(moved).rows) >
            1e-3);
    }
  }
}

TEST_CASE("SR quaternion columns are canonical") {
  Rng rng(35);
  const Take take = random_take(rng, 30);
  const FeatureSequence seq = encode_sr(take);
  // w components sit at columns 6, 13, 20.
  for (Eigen::Index r = 0; r < seq.rows.rows(); ++r) {
    CHECK(seq.rows(r, 6) >= 0.0);
    CHECK(seq.rows(r, 13) >= 0.0);
    CHECK(seq.rows(r, 20) >= 0.0);
  }
}

TEST_CASE("static take yields zero BRV deltas") {
  Rng rng(36);
  Take take = random_take(rng, 1);
  for (int i = 0; i < 9; ++i) take.frames.push_back(take.frames[0]);
  const FeatureSequence seq = encode_brv(take);
  // Positional deltas zero, rotational deltas identity (w = 1).
  for (Eigen::Index r = 0; r < seq.rows.rows(); ++r) {
    for (int c = 0; c < 3; ++c) CHECK(std::abs(seq.rows(r, c)) < 1e-12);
    CHECK(seq.rows(r, 6) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("BRV positional deltas integrate back to BR positions") {
  Rng rng(37);
  const Take take = random_take(rng, 25);
  const FeatureSequence br = encode_br(take);
  const FeatureSequence brv = encode_brv(take);
  // Left-wrist position columns are 0..2 in both encodings.
  for (int c = 0; c < 3; ++c) {
    double acc = br.rows(0, c);
    for (Eigen::Index r = 0; r < brv.rows.rows(); ++r) {
      acc += brv.rows(r, c);
      CHECK(acc == doctest::Approx(br.rows(r + 1, c)).epsilon(1e-9));
    }
  }
}

TEST_CASE("BRV rotation deltas recompose the BR rotation track") {
  Rng rng(38);
  const Take take = random_take(rng, 20);
  const FeatureSequence br = encode_br(take);
  const FeatureSequence brv = encode_brv(take);
  // Left-wrist quaternion columns are 3..6.
  UnitQuaternion acc{br.rows(0, 3), br.rows(0, 4), br.rows(0, 5),
                     br.rows(0, 6)};
  for (Eigen::Index r = 0; r < brv.rows.rows(); ++r) {
    const UnitQuaternion delta{brv.rows(r, 3), brv.rows(r, 4),
                               brv.rows(r, 5), brv.rows(r, 6)};
    acc = quat_mul(delta, acc);
    const UnitQuaternion expected{br.rows(r + 1, 3), br.rows(r + 1, 4),
                                  br.rows(r + 1, 5), br.rows(r + 1, 6)};
    CHECK(std::abs(acc.dot(expected)) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("full head frame variant changes the output") {
  Rng rng(39);
  const Take take = random_take(rng, 15);
  const FeatureSequence heading = encode_br(take, kUpAxis, false);
  const FeatureSequence full = encode_br(take, kUpAxis, true);
  CHECK(max_abs_diff(heading.rows, full.rows) > 1e-6);
}

TEST_CASE("encoding names round-trip") {
  for (EncodingKind kind :
       {EncodingKind::SR, EncodingKind::BR, EncodingKind::BRV}) {
    CHECK(encoding_from_string(to_string(kind)) == kind);
  }
}
