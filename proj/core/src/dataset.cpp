#include "xrid/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <fstream>

#include "xrid/error.hpp"
#include "xrid/rng.hpp"

namespace xrid {

double movement_score(const Take& take) {
  const std::size_t n = take.frames.size();
  if (n == 0) return 0.0;
  double sum[9] = {};
  double sq[9] = {};
  for (const MotionFrame& f : take.frames) {
    const double v[9] = {f.head.position.x,        f.head.position.y,
                         f.head.position.z,        f.wrist_left.position.x,
                         f.wrist_left.position.y,  f.wrist_left.position.z,
                         f.wrist_right.position.x, f.wrist_right.position.y,
                         f.wrist_right.position.z};
    for (int i = 0; i < 9; ++i) {
      sum[i] += v[i];
      sq[i] += v[i] * v[i];
    }
  }
  double best = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double mean = sum[i] / static_cast<double>(n);
    const double var = std::max(0.0, sq[i] / static_cast<double>(n) - mean * mean);
    best = std::max(best, std::sqrt(var));
  }
  return best;
}

DatasetSplit filter_and_split(
    const Manifest& manifest, const FilterPolicy& policy,
    const std::function<double(const ManifestTake&)>& score_fn) {
  DatasetSplit split;
  for (const auto& subject : manifest.subjects) {
    // Take-level filter.
    std::vector<const ManifestTake*> surviving;
    for (const auto& t : subject.takes) {
      if (!t.two_subject_scene) continue;
      if (t.fps <= 0.0) continue;
      const double seconds = static_cast<double>(t.frame_count) / t.fps;
      if (seconds < policy.min_take_seconds) continue;
      if (score_fn && score_fn(t) < policy.movement_threshold) continue;
      surviving.push_back(&t);
    }

    // Keep only the session with the greatest total take length.
    std::map<std::string, double> session_seconds;
    for (const auto* t : surviving) {
      session_seconds[t->session_id] +=
          static_cast<double>(t->frame_count) / t->fps;
    }
    if (session_seconds.size() > 1) {
      std::string best;
      double best_len = -1.0;
      for (const auto& [session, len] : session_seconds) {
        if (len > best_len) {  // map order breaks ties lexicographically
          best_len = len;
          best = session;
        }
      }
      std::erase_if(surviving, [&](const ManifestTake* t) {
        return t->session_id != best;
      });
    }

    if (static_cast<int>(surviving.size()) < policy.min_takes_per_subject ||
        surviving.size() < 3) {
      continue;
    }

    std::sort(surviving.begin(), surviving.end(),
              [](const ManifestTake* a, const ManifestTake* b) {
                const double la = static_cast<double>(a->frame_count) / a->fps;
                const double lb = static_cast<double>(b->frame_count) / b->fps;
                if (la != lb) return la < lb;
                return a->take_id < b->take_id;
              });

    split.test.push_back({subject.subject_id, surviving[0]->take_id});
    split.validation.push_back({subject.subject_id, surviving[1]->take_id});
    for (std::size_t i = 2; i < surviving.size(); ++i) {
      split.train.push_back({subject.subject_id, surviving[i]->take_id});
    }
  }
  if (split.test.empty()) {
    throw DataError("no subjects survive the filter policy");
  }
  return split;
}

void write_split(const std::string& path, const DatasetSplit& split) {
  std::string body = "subject_id,take_id,role\n";
  auto emit = [&](const std::vector<TakeRef>& refs, const char* role) {
    for (const auto& r : refs) {
      body += r.subject_id + "," + r.take_id + "," + role + "\n";
    }
  };
  emit(split.train, "train");
  emit(split.validation, "validation");
  emit(split.test, "test");
  atomic_write(path, body);
}

DatasetSplit read_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open split file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "subject_id,take_id,role") {
    throw DataError("split file: bad header");
  }
  DatasetSplit split;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string subject, take, role;
    if (!std::getline(row, subject, ',') || !std::getline(row, take, ',') ||
        !std::getline(row, role)) {
      throw DataError("split file: bad row '" + line + "'");
    }
    if (role == "train") {
      split.train.push_back({subject, take});
    } else if (role == "validation") {
      split.validation.push_back({subject, take});
    } else if (role == "test") {
      split.test.push_back({subject, take});
    } else {
      throw DataError("split file: unknown role '" + role + "'");
    }
  }
  return split;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Oscillator {
  double freq = 0.0;       // Hz
  double amp[3] = {};      // meters per axis
  double phase[3] = {};    // subject-level phase coupling between axes
};

struct LimbSignature {
  Vec3 rest;
  std::vector<Oscillator> motion;  // band-limited, subject-specific
  Vec3 rot_axis;                   // local rotation oscillation
  double rot_amp = 0.0;            // radians
  double rot_freq = 0.0;
  UnitQuaternion rest_rot;
};

struct SubjectSignature {
  double head_height = 1.6;
  Vec3 home;
  double facing = 0.0;
  double yaw_amp = 0.0, yaw_freq = 0.0;
  double pitch_amp = 0.0, pitch_freq = 0.0;
  double roll_amp = 0.0, roll_freq = 0.0;
  double bob_amp = 0.0, bob_freq = 0.0;
  std::vector<Oscillator> sway;  // horizontal head drift
  LimbSignature wrist_left;
  LimbSignature wrist_right;
};

Oscillator draw_oscillator(Rng& rng, double f_lo, double f_hi, double a_lo,
                           double a_hi) {
  Oscillator o;
  o.freq = rng.uniform(f_lo, f_hi);
  for (int a = 0; a < 3; ++a) {
    o.amp[a] = rng.uniform(a_lo, a_hi);
    o.phase[a] = rng.uniform(0.0, kTwoPi);
  }
  return o;
}

Vec3 random_unit(Rng& rng) {
  for (;;) {
    Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double n = v.norm();
    if (n > 1e-3 && n <= 1.0) return v * (1.0 / n);
  }
}

// Amplitude draws are deliberately narrow: vertical extents and motion
// magnitudes overlap heavily across subjects (and get blurred further by
// the within-take drifts), so identity lives in the horizontal rest
// offsets, the rest rotations, and the oscillator frequencies — not in
// "how big" the motion is, which a scene shift cannot disturb.
LimbSignature draw_limb(Rng& rng, double side) {
  LimbSignature limb;
  limb.rest = {side * rng.uniform(0.12, 0.30), -rng.uniform(0.44, 0.52),
               rng.uniform(0.15, 0.40)};
  for (int k = 0; k < 3; ++k) {
    limb.motion.push_back(draw_oscillator(rng, 0.25, 2.2, 0.035, 0.055));
  }
  limb.rot_axis = random_unit(rng);
  limb.rot_amp = rng.uniform(0.25, 0.35);
  limb.rot_freq = rng.uniform(0.3, 2.0);
  limb.rest_rot = UnitQuaternion::from_axis_angle(random_unit(rng),
                                                  rng.uniform(0.0, 1.2));
  return limb;
}

SubjectSignature draw_subject(std::uint64_t seed, int index, int n_subjects) {
  Rng rng(derive_seed(seed, "synth-subject", static_cast<std::uint64_t>(index)));
  SubjectSignature s;
  s.head_height = rng.uniform(1.60, 1.70);

  // Homes on a 0.5 m lattice: a (+0.5, +0.5) scene shift lands each
  // subject on a neighbor's cell, which is what the offset probe needs.
  const int cols = static_cast<int>(std::ceil(std::sqrt(n_subjects)));
  s.home = {0.5 * static_cast<double>(index % cols), 0.0,
            0.5 * static_cast<double>(index / cols)};
  s.facing = rng.uniform(-3.1, 3.1);

  s.yaw_amp = rng.uniform(0.12, 0.20);
  s.yaw_freq = rng.uniform(0.1, 0.8);
  s.pitch_amp = rng.uniform(0.08, 0.14);
  s.pitch_freq = rng.uniform(0.2, 1.2);
  s.roll_amp = rng.uniform(0.04, 0.07);
  s.roll_freq = rng.uniform(0.2, 1.0);
  s.bob_amp = rng.uniform(0.015, 0.022);
  s.bob_freq = rng.uniform(0.3, 1.5);
  for (int k = 0; k < 2; ++k) {
    s.sway.push_back(draw_oscillator(rng, 0.05, 0.4, 0.025, 0.040));
  }
  s.wrist_left = draw_limb(rng, -1.0);
  s.wrist_right = draw_limb(rng, +1.0);
  return s;
}

// A slow sinusoid (periods of tens of seconds) used for within-take
// drifts of facing, posture, and vigor. Roughly constant inside one bin
// or window, but sweeping its full range over a long take, so a model
// cannot treat the drifting quantity as a subject trait.
struct SlowDrift {
  double amp = 0.0, freq = 0.0, phase = 0.0;
  double at(double t) const {
    return amp * std::sin(kTwoPi * freq * t + phase);
  }
};

SlowDrift draw_drift(Rng& rng, double amp_lo, double amp_hi) {
  return {rng.uniform(amp_lo, amp_hi), rng.uniform(0.004, 0.02),
          rng.uniform(0.0, kTwoPi)};
}

// Per-take variation: phase offsets for every oscillator plus small
// band-limited noise components and the slow drifts.
struct TakeVariation {
  std::vector<double> phases;   // consumed in a fixed draw order
  std::vector<Oscillator> noise_lw, noise_rw, noise_head;
  Vec3 home_jitter;
  double facing_jitter = 0.0;
  SlowDrift facing_drift, lean_drift;
  SlowDrift vigor_head, vigor_lw, vigor_rw;  // 1 + at(t) scales amplitudes

  double next_phase(std::size_t& cursor) const { return phases[cursor++]; }
};

TakeVariation draw_variation(std::uint64_t seed, int subject, int take,
                             bool vary_home) {
  Rng rng(derive_seed(seed, "synth-take",
                      static_cast<std::uint64_t>(subject) * 100003ULL +
                          static_cast<std::uint64_t>(take)));
  TakeVariation v;
  for (int i = 0; i < 32; ++i) v.phases.push_back(rng.uniform(0.0, kTwoPi));
  auto noise = [&] {
    std::vector<Oscillator> out;
    for (int k = 0; k < 4; ++k) {
      out.push_back(draw_oscillator(rng, 0.05, 1.2, 0.003, 0.012));
    }
    return out;
  };
  v.noise_lw = noise();
  v.noise_rw = noise();
  v.noise_head = noise();
  // Facing, posture, and vigor are recording accidents, not identity:
  // which way someone faces, how upright they stand, and how energetic
  // they are all wander during a session. They drift slowly *within*
  // every take so nothing take-constant besides the home position (and
  // the anatomy carried by the body-relative features) identifies the
  // subject. Home position varies only on request so the scene-relative
  // shortcut (where the subject stands) stays intact by default.
  v.facing_jitter = rng.uniform(-kTwoPi / 2.0, kTwoPi / 2.0);
  v.facing_drift = draw_drift(rng, 2.2, 3.1);
  v.lean_drift = draw_drift(rng, 0.06, 0.12);
  v.vigor_head = draw_drift(rng, 0.15, 0.35);
  v.vigor_lw = draw_drift(rng, 0.15, 0.35);
  v.vigor_rw = draw_drift(rng, 0.15, 0.35);
  if (vary_home) {
    v.home_jitter = {rng.uniform(-0.4, 0.4), 0.0, rng.uniform(-0.4, 0.4)};
  }
  return v;
}

Vec3 eval_oscillators(const std::vector<Oscillator>& oscs, double t,
                      const TakeVariation& var, std::size_t& phase_cursor,
                      double amp_scale) {
  Vec3 out;
  for (const Oscillator& o : oscs) {
    const double tp = var.phases[phase_cursor++ % var.phases.size()];
    out.x += amp_scale * o.amp[0] * std::sin(kTwoPi * o.freq * t + o.phase[0] + tp);
    out.y += amp_scale * o.amp[1] * std::sin(kTwoPi * o.freq * t + o.phase[1] + tp);
    out.z += amp_scale * o.amp[2] * std::sin(kTwoPi * o.freq * t + o.phase[2] + tp);
  }
  return out;
}

}  // namespace

std::vector<Take> synth_generate(const SynthParams& p) {
  if (p.n_subjects < 1) throw DataError("synth: n_subjects must be >= 1");
  if (p.takes_per_subject < 1) {
    throw DataError("synth: takes_per_subject must be >= 1");
  }
  if (p.seconds_per_take <= 0.0 || p.fps <= 0.0) {
    throw DataError("synth: seconds_per_take and fps must be positive");
  }

  std::vector<Take> takes;
  const auto n_frames =
      static_cast<std::size_t>(std::llround(p.seconds_per_take * p.fps));

  for (int si = 0; si < p.n_subjects; ++si) {
    const SubjectSignature sig = draw_subject(p.seed, si, p.n_subjects);
    char sid[16];
    std::snprintf(sid, sizeof(sid), "s%02d", si);

    for (int ti = 0; ti < p.takes_per_subject; ++ti) {
      const TakeVariation var =
          draw_variation(p.seed, si, ti, p.vary_home_per_take);
      Take take;
      take.subject_id = sid;
      char tid[16];
      std::snprintf(tid, sizeof(tid), "t%02d", ti);
      take.take_id = tid;
      take.fps = p.fps;
      take.frames.reserve(n_frames);

      const Vec3 home = sig.home + var.home_jitter;
      const double facing = sig.facing + var.facing_jitter;

      for (std::size_t fi = 0; fi < n_frames; ++fi) {
        const double t = static_cast<double>(fi) / p.fps;
        std::size_t cursor = 0;

        const double hs = 1.0 + var.vigor_head.at(t);
        const Vec3 sway = eval_oscillators(sig.sway, t, var, cursor, hs);
        const double bob =
            hs * sig.bob_amp *
            std::sin(kTwoPi * sig.bob_freq * t + var.phases[cursor++ % 32]);
        const double yaw =
            facing + var.facing_drift.at(t) +
            hs * sig.yaw_amp * std::sin(kTwoPi * sig.yaw_freq * t +
                                        var.phases[cursor++ % 32]);
        const double pitch =
            hs * sig.pitch_amp *
            std::sin(kTwoPi * sig.pitch_freq * t + var.phases[cursor++ % 32]);
        const double roll =
            hs * sig.roll_amp *
            std::sin(kTwoPi * sig.roll_freq * t + var.phases[cursor++ % 32]);

        const UnitQuaternion heading =
            UnitQuaternion::from_axis_angle({0, 1, 0}, yaw);
        MotionFrame frame;
        frame.head.position =
            home +
            Vec3{sway.x, sig.head_height + var.lean_drift.at(t) + bob, sway.z};
        frame.head.rotation = quat_mul(
            heading,
            quat_mul(UnitQuaternion::from_axis_angle({1, 0, 0}, pitch),
                     UnitQuaternion::from_axis_angle({0, 0, 1}, roll)));

        auto wrist = [&](const LimbSignature& limb,
                         const std::vector<Oscillator>& noise,
                         const SlowDrift& vigor) {
          const double ls = 1.0 + vigor.at(t);
          std::size_t c2 = cursor;
          Vec3 local = limb.rest +
                       eval_oscillators(limb.motion, t, var, c2, ls) +
                       eval_oscillators(noise, t, var, c2, 1.0);
          const double angle =
              ls * limb.rot_amp * std::sin(kTwoPi * limb.rot_freq * t +
                                           var.phases[c2++ % 32]);
          Pose pose;
          pose.position = frame.head.position + rotate_vec(heading, local);
          pose.rotation = quat_mul(
              heading,
              quat_mul(UnitQuaternion::from_axis_angle(limb.rot_axis, angle),
                       limb.rest_rot));
          return pose;
        };
        frame.wrist_left = wrist(sig.wrist_left, var.noise_lw, var.vigor_lw);
        frame.wrist_right = wrist(sig.wrist_right, var.noise_rw, var.vigor_rw);
        take.frames.push_back(frame);
      }
      takes.push_back(std::move(take));
    }
  }
  return takes;
}

}  // namespace xrid
