#include "xrid/bvh.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

#include "xrid/error.hpp"

namespace xrid {

namespace {

std::size_t count_channels(const BvhJoint& j) {
  std::size_t n = j.channels.size();
  for (const auto& c : j.children) n += count_channels(c);
  return n;
}

// Whitespace tokenizer that tracks line numbers for diagnostics.
class Lexer {
 public:
  explicit Lexer(std::istream& in) : in_(in) {}

  bool next(std::string& tok) {
    tok.clear();
    int c;
    while ((c = in_.get()) != EOF) {
      if (c == '\n') {
        line_++;
        if (!tok.empty()) return true;
      } else if (std::isspace(c)) {
        if (!tok.empty()) return true;
      } else {
        tok.push_back(static_cast<char>(c));
      }
    }
    return !tok.empty();
  }

  std::string expect() {
    std::string tok;
    if (!next(tok)) fail("unexpected end of input");
    return tok;
  }

  void expect_literal(const std::string& want) {
    const std::string got = expect();
    if (got != want) fail("expected '" + want + "', got '" + got + "'");
  }

  double expect_number() {
    const std::string tok = expect();
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      fail("expected a number, got '" + tok + "'");
    }
    return 0.0;  // unreachable
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError("bvh parse error at line " + std::to_string(line_) + ": " +
                    msg);
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 1;
};

BvhChannel parse_channel(Lexer& lex, const std::string& tok) {
  if (tok == "Xposition") return BvhChannel::Xposition;
  if (tok == "Yposition") return BvhChannel::Yposition;
  if (tok == "Zposition") return BvhChannel::Zposition;
  if (tok == "Xrotation") return BvhChannel::Xrotation;
  if (tok == "Yrotation") return BvhChannel::Yrotation;
  if (tok == "Zrotation") return BvhChannel::Zrotation;
  lex.fail("unknown channel '" + tok + "'");
}

void parse_offset(Lexer& lex, Vec3& out) {
  lex.expect_literal("OFFSET");
  out.x = lex.expect_number();
  out.y = lex.expect_number();
  out.z = lex.expect_number();
}

BvhJoint parse_joint_body(Lexer& lex, const std::string& name, bool is_root) {
  BvhJoint joint;
  joint.name = name;
  lex.expect_literal("{");
  parse_offset(lex, joint.offset);

  std::string tok = lex.expect();
  if (tok == "CHANNELS") {
    const int n = static_cast<int>(lex.expect_number());
    // 6 channels are tolerated on non-root joints; some exporters emit
    // position channels there.
    (void)is_root;
    if (n != 3 && n != 6) lex.fail("CHANNELS count must be 3 or 6");
    for (int i = 0; i < n; ++i) joint.channels.push_back(parse_channel(lex, lex.expect()));
    tok = lex.expect();
  }

  while (tok != "}") {
    if (tok == "JOINT") {
      const std::string child_name = lex.expect();
      joint.children.push_back(parse_joint_body(lex, child_name, false));
    } else if (tok == "End") {
      lex.expect_literal("Site");
      lex.expect_literal("{");
      BvhJoint end;
      end.name = joint.name + "__end";
      end.is_end_site = true;
      parse_offset(lex, end.offset);
      lex.expect_literal("}");
      joint.children.push_back(std::move(end));
    } else {
      lex.fail("expected JOINT, End Site or '}', got '" + tok + "'");
    }
    tok = lex.expect();
  }
  return joint;
}

void check_unique_names(const BvhJoint& j, std::map<std::string, int>& seen) {
  if (!j.is_end_site && ++seen[j.name] > 1) {
    throw DataError("bvh parse error: duplicate joint name '" + j.name + "'");
  }
  for (const auto& c : j.children) check_unique_names(c, seen);
}

UnitQuaternion euler_channel_rotation(BvhChannel ch, double degrees) {
  constexpr double deg2rad = 0.017453292519943295;
  const double r = degrees * deg2rad;
  switch (ch) {
    case BvhChannel::Xrotation:
      return UnitQuaternion::from_axis_angle({1, 0, 0}, r);
    case BvhChannel::Yrotation:
      return UnitQuaternion::from_axis_angle({0, 1, 0}, r);
    case BvhChannel::Zrotation:
      return UnitQuaternion::from_axis_angle({0, 0, 1}, r);
    default:
      return UnitQuaternion::identity();
  }
}

void fk_walk(const BvhJoint& joint, const std::vector<double>& row,
             std::size_t& cursor, const Pose& parent,
             std::map<std::string, Pose>& out) {
  Vec3 local_pos = joint.offset;
  UnitQuaternion local_rot = UnitQuaternion::identity();
  for (BvhChannel ch : joint.channels) {
    const double v = row[cursor++];
    switch (ch) {
      case BvhChannel::Xposition:
        local_pos.x = joint.offset.x + v;
        break;
      case BvhChannel::Yposition:
        local_pos.y = joint.offset.y + v;
        break;
      case BvhChannel::Zposition:
        local_pos.z = joint.offset.z + v;
        break;
      default:
        // Intrinsic composition in declared order.
        local_rot = quat_mul(local_rot, euler_channel_rotation(ch, v));
        break;
    }
  }
  Pose world;
  world.position = parent.position + rotate_vec(parent.rotation, local_pos);
  world.rotation = quat_mul(parent.rotation, local_rot);
  if (!joint.is_end_site) out[joint.name] = world;
  for (const auto& child : joint.children) {
    fk_walk(child, row, cursor, world, out);
  }
}

const BvhJoint* find_joint(const BvhJoint& j, const std::string& name) {
  if (!j.is_end_site && j.name == name) return &j;
  for (const auto& c : j.children) {
    if (const BvhJoint* hit = find_joint(c, name)) return hit;
  }
  return nullptr;
}

void collect_names(const BvhJoint& j, std::vector<std::string>& out) {
  if (!j.is_end_site) out.push_back(j.name);
  for (const auto& c : j.children) collect_names(c, out);
}

}  // namespace

std::size_t BvhClip::channel_count() const { return count_channels(root); }

BvhClip parse_bvh(std::istream& in) {
  Lexer lex(in);
  lex.expect_literal("HIERARCHY");
  lex.expect_literal("ROOT");
  BvhClip clip;
  clip.root = parse_joint_body(lex, lex.expect(), true);

  std::map<std::string, int> seen;
  check_unique_names(clip.root, seen);

  lex.expect_literal("MOTION");
  lex.expect_literal("Frames:");
  const long n_frames = static_cast<long>(lex.expect_number());
  if (n_frames < 0) lex.fail("negative frame count");
  lex.expect_literal("Frame");
  lex.expect_literal("Time:");
  clip.frame_time = lex.expect_number();
  if (clip.frame_time <= 0.0) lex.fail("Frame Time must be positive");

  const std::size_t width = clip.channel_count();
  clip.frames.reserve(static_cast<std::size_t>(n_frames));
  std::string tok;
  std::vector<double> row;
  row.reserve(width);
  while (lex.next(tok)) {
    double v;
    try {
      std::size_t pos = 0;
      v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      lex.fail("expected a channel value, got '" + tok + "'");
    }
    row.push_back(v);
    if (row.size() == width) {
      clip.frames.push_back(row);
      row.clear();
    }
  }
  if (!row.empty()) {
    throw DataError("bvh parse error: trailing partial frame of " +
                    std::to_string(row.size()) + " values (row width " +
                    std::to_string(width) + ")");
  }
  if (clip.frames.size() != static_cast<std::size_t>(n_frames)) {
    throw DataError("bvh parse error: frame count mismatch (declared " +
                    std::to_string(n_frames) + ", found " +
                    std::to_string(clip.frames.size()) + ")");
  }
  return clip;
}

BvhClip parse_bvh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open bvh file: " + path);
  return parse_bvh(in);
}

std::map<std::string, Pose> forward_kinematics(const BvhClip& clip,
                                               std::size_t frame_index) {
  if (frame_index >= clip.frames.size()) {
    throw DataError("frame index " + std::to_string(frame_index) +
                    " out of range (have " +
                    std::to_string(clip.frames.size()) + " frames)");
  }
  std::map<std::string, Pose> out;
  std::size_t cursor = 0;
  fk_walk(clip.root, clip.frames[frame_index], cursor, Pose{}, out);
  return out;
}

AxisMap AxisMap::parse(const std::string& spec) {
  AxisMap m;
  std::size_t i = 0;
  int slot = 0;
  bool used[3] = {false, false, false};
  while (i < spec.size() && slot < 3) {
    double sign = 1.0;
    if (spec[i] == '-') {
      sign = -1.0;
      ++i;
      if (i >= spec.size()) break;
    }
    const char c = spec[i];
    int axis = c == 'x' ? 0 : c == 'y' ? 1 : c == 'z' ? 2 : -1;
    if (axis < 0 || used[axis]) {
      throw DataError("invalid axis map '" + spec + "'");
    }
    used[axis] = true;
    m.perm[slot] = axis;
    m.sign[slot] = sign;
    ++slot;
    ++i;
  }
  if (slot != 3 || i != spec.size()) {
    throw DataError("invalid axis map '" + spec + "'");
  }
  return m;
}

Vec3 AxisMap::apply(const Vec3& v) const {
  const double src[3] = {v.x, v.y, v.z};
  return {sign[0] * src[perm[0]], sign[1] * src[perm[1]],
          sign[2] * src[perm[2]]};
}

UnitQuaternion AxisMap::apply(const UnitQuaternion& q) const {
  // Valid for right-handed (det +1) maps: remap the vector part like a
  // vector and keep w.
  const Vec3 u = apply(Vec3{q.x, q.y, q.z});
  return UnitQuaternion{u.x, u.y, u.z, q.w}.normalized();
}

Take extract_three_point(const BvhClip& clip, const std::string& head_name,
                         const std::string& left_name,
                         const std::string& right_name, double unit_scale,
                         const AxisMap& axes) {
  for (const std::string* name : {&head_name, &left_name, &right_name}) {
    if (!find_joint(clip.root, *name)) {
      std::vector<std::string> names;
      collect_names(clip.root, names);
      std::ostringstream msg;
      msg << "unknown joint '" << *name << "'; available joints:";
      for (const auto& n : names) msg << ' ' << n;
      throw DataError(msg.str());
    }
  }
  if (clip.frames.empty()) throw DataError("clip has no frames");

  Take take;
  take.fps = 1.0 / clip.frame_time;
  take.frames.reserve(clip.frames.size());

  auto convert = [&](const Pose& p) {
    Pose out;
    out.position = axes.apply(p.position) * unit_scale;
    out.rotation = canonicalize(axes.apply(p.rotation));
    return out;
  };

  for (std::size_t f = 0; f < clip.frames.size(); ++f) {
    const auto world = forward_kinematics(clip, f);
    MotionFrame frame;
    frame.head = convert(world.at(head_name));
    frame.wrist_left = convert(world.at(left_name));
    frame.wrist_right = convert(world.at(right_name));
    if (!take.frames.empty()) {
      // Temporal hemisphere continuity.
      const MotionFrame& prev = take.frames.back();
      auto flip = [](UnitQuaternion& q, const UnitQuaternion& p) {
        if (q.dot(p) < 0.0) q = q.negated();
      };
      flip(frame.head.rotation, prev.head.rotation);
      flip(frame.wrist_left.rotation, prev.wrist_left.rotation);
      flip(frame.wrist_right.rotation, prev.wrist_right.rotation);
    }
    take.frames.push_back(frame);
  }
  return take;
}

}  // namespace xrid
