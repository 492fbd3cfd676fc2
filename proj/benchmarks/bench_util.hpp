#pragma once

#include "xrid/rng.hpp"
#include "xrid/take_io.hpp"

namespace xrid::bench {

inline Take random_take(std::uint64_t seed, int frames, double fps = 90.0) {
  Rng rng(seed);
  Take take;
  take.subject_id = "s";
  take.take_id = "t";
  take.fps = fps;
  take.frames.reserve(static_cast<std::size_t>(frames));
  for (int i = 0; i < frames; ++i) {
    MotionFrame f;
    for (Pose* p : {&f.head, &f.wrist_left, &f.wrist_right}) {
      p->position = {rng.uniform(-2, 2), rng.uniform(0.5, 2),
                     rng.uniform(-2, 2)};
      UnitQuaternion q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
      p->rotation = q.normalized();
    }
    take.frames.push_back(f);
  }
  return take;
}

}  // namespace xrid::bench
