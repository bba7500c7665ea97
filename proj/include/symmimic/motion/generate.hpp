#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/json_util.hpp"
#include "symmimic/core/rng.hpp"
#include "symmimic/model/kinematics.hpp"
#include "symmimic/motion/clip.hpp"

// Procedural reference motions. Every kind is the default pose plus an offset
// scaled by a sin^2 envelope that is zero at both ends of the part, so parts
// start and finish at the default pose and composites join without a jump.

namespace symmimic {

struct GenParams {
  std::string kind = "stand";  // stand | wave | reach | squat | walk_in_place | swing | composite
  double duration = 4.0;       // s, per part
  double amplitude = 0.6;      // rad
  double frequency = 0.5;      // Hz
  std::string side = "left";   // left | right | both (arm kinds)
  double fps = 50.0;
  double heading = 0.0;        // root yaw, rad
  std::vector<GenParams> parts;  // composite only
};

inline std::vector<std::string> generator_kinds() {
  return {"stand", "wave", "reach", "squat", "walk_in_place", "swing", "composite"};
}

inline Json to_json(const GenParams& p) {
  Json j = {{"kind", p.kind},           {"duration", p.duration}, {"amplitude", p.amplitude},
            {"frequency", p.frequency}, {"side", p.side},         {"fps", p.fps},
            {"heading", p.heading}};
  if (!p.parts.empty()) {
    j["parts"] = Json::array();
    for (const auto& q : p.parts) j["parts"].push_back(to_json(q));
  }
  return j;
}

inline GenParams gen_params_from_json(const Json& j) {
  check_keys(j, {"kind", "duration", "amplitude", "frequency", "side", "fps", "heading", "parts"}, "generator");
  GenParams p;
  read_opt(j, "kind", p.kind);
  read_opt(j, "duration", p.duration);
  read_opt(j, "amplitude", p.amplitude);
  read_opt(j, "frequency", p.frequency);
  read_opt(j, "side", p.side);
  read_opt(j, "fps", p.fps);
  read_opt(j, "heading", p.heading);
  if (j.contains("parts"))
    for (const auto& q : j.at("parts")) p.parts.push_back(gen_params_from_json(q));
  return p;
}

namespace detail {

inline int require_joint(const RobotModel& m, const std::string& name, const std::string& kind) {
  const int j = m.find_joint(name);
  if (j < 0) throw ConfigError("generator '" + kind + "' needs joint '" + name + "' in model '" + m.name + "'");
  return j;
}

inline std::vector<std::string> sides(const std::string& side) {
  if (side == "left" || side == "right") return {side};
  if (side == "both") return {"left", "right"};
  throw ConfigError("generator side must be left, right or both, got '" + side + "'");
}

/// Pelvis height that puts the lowest contact sphere on the ground.
inline double standing_height(const RobotModel& m, const VecX& q) {
  if (m.contact_spheres.empty()) return 0.0;
  const auto poses = forward_kinematics(m, Pose{}, q);
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& s : m.contact_spheres) lowest = std::min(lowest, poses[s.link].apply(s.offset).z() - s.radius);
  return -lowest;
}

// Joint offsets of one kind at time t within a part of length T.
inline VecX part_offset(const RobotModel& m, const GenParams& p, double t, double T) {
  VecX d = VecX::Zero(m.num_joints());
  const double env = T > 0.0 ? std::pow(std::sin(kPi * t / T), 2) : 0.0;
  const double A = p.amplitude;
  const double phase = 2.0 * kPi * p.frequency * t;
  if (p.kind == "stand") return d;
  if (p.kind == "wave") {
    for (const auto& s : sides(p.side)) {
      const double out = s == "left" ? 1.0 : -1.0;  // roll sign that lifts the arm sideways
      d[require_joint(m, s + "_shoulder_roll", p.kind)] += out * A * env;
      d[require_joint(m, s + "_shoulder_pitch", p.kind)] -= 0.5 * A * env;
      d[require_joint(m, s + "_elbow", p.kind)] -= 0.5 * A * env * (1.0 + std::sin(phase));
    }
  } else if (p.kind == "reach") {
    for (const auto& s : sides(p.side)) {
      d[require_joint(m, s + "_shoulder_pitch", p.kind)] -= A * env;
      d[require_joint(m, s + "_elbow", p.kind)] += 0.2 * A * env;
    }
  } else if (p.kind == "squat") {
    // Hip/knee/ankle offsets sum to zero so the feet stay flat.
    const double depth = A * env * 0.5 * (1.0 - std::cos(phase));
    for (const char* s : {"left", "right"}) {
      const std::string side = s;
      d[require_joint(m, side + "_hip_pitch", p.kind)] -= depth;
      d[require_joint(m, side + "_knee", p.kind)] += 2.0 * depth;
      d[require_joint(m, side + "_ankle_pitch", p.kind)] -= depth;
    }
  } else if (p.kind == "walk_in_place") {
    const double sw = std::sin(phase);
    const double lift[2] = {A * env * std::max(0.0, sw), A * env * std::max(0.0, -sw)};
    const char* names[2] = {"left", "right"};
    for (int i = 0; i < 2; ++i) {
      const std::string side = names[i];
      d[require_joint(m, side + "_hip_pitch", p.kind)] -= lift[i];
      d[require_joint(m, side + "_knee", p.kind)] += 2.0 * lift[i];
      d[require_joint(m, side + "_ankle_pitch", p.kind)] -= lift[i];
      // Opposite arm swings forward with the lifted leg.
      const int sp = m.find_joint((i == 0 ? std::string("right") : std::string("left")) + "_shoulder_pitch");
      if (sp >= 0) d[sp] -= 0.5 * lift[i];
    }
  } else if (p.kind == "swing") {
    // Every joint follows the same sinusoid; works for any model.
    d.setConstant(A * env * std::sin(phase));
  } else {
    throw ConfigError("unknown generator kind '" + p.kind + "'");
  }
  return d;
}

inline void check_limits(const RobotModel& m, const MotionClip& c) {
  for (int i = 0; i < c.num_frames(); ++i)
    for (int j = 0; j < m.num_joints(); ++j) {
      const double q = c.frames[i].q[j];
      if (q < m.joints[j].lower || q > m.joints[j].upper)
        throw ValidationError("generated angle outside limits: joint '" + m.joints[j].name + "' frame " +
                              std::to_string(i) + " value " + std::to_string(q));
    }
}

inline void append_part(const RobotModel& m, const GenParams& p, MotionClip& clip) {
  if (!(p.duration > 0.0)) throw ConfigError("generator duration must be positive");
  if (p.amplitude < 0.0) throw ConfigError("generator amplitude must be >= 0");
  const int n = std::max(2, static_cast<int>(std::llround(p.duration * clip.fps)) + 1);
  const double T = (n - 1) / clip.fps;
  const VecX q0 = m.default_pose();
  const bool track_height = p.kind == "squat";
  const double h0 = standing_height(m, q0);
  const Quat yaw = yaw_quat(p.heading);
  for (int i = 0; i < n; ++i) {
    MotionFrame f;
    f.q = q0 + part_offset(m, p, i / clip.fps, T);
    f.root_position = Vec3(0.0, 0.0, track_height ? standing_height(m, f.q) : h0);
    f.root_orientation = yaw;
    clip.frames.push_back(std::move(f));
  }
}

}  // namespace detail

/// Builds a clip of `p.kind` for model `m` (see GenParams).
inline MotionClip generate(const GenParams& p, const RobotModel& m) {
  if (!(p.fps > 0.0)) throw ConfigError("generator fps must be positive");
  MotionClip clip;
  clip.fps = p.fps;
  clip.joint_names = joint_names(m);
  if (p.kind == "composite") {
    if (p.parts.empty()) throw ConfigError("composite generator needs at least one part");
    std::string name = "composite";
    for (auto part : p.parts) {
      if (part.kind == "composite") throw ConfigError("composite parts cannot be composite");
      part.heading = p.heading;
      detail::append_part(m, part, clip);
      name += "_" + part.kind;
    }
    clip.name = name;
  } else {
    detail::append_part(m, p, clip);
    clip.name = p.kind;
  }
  detail::check_limits(m, clip);
  validate(clip);
  return clip;
}

/// A seeded mix of generator kinds with randomized amplitude, frequency,
/// side and duration; names are "<kind>_<index>".
inline std::vector<MotionClip> generate_dataset(const RobotModel& m, int count, std::uint64_t seed,
                                                double duration = 4.0) {
  Rng rng(seed);
  const std::vector<std::string> kinds = {"wave", "reach", "squat", "walk_in_place", "stand", "composite"};
  const std::vector<std::string> side_opts = {"left", "right", "both"};
  auto draw = [&](const std::string& kind) {
    GenParams p;
    p.kind = kind;
    p.duration = duration;
    p.side = side_opts[rng.integer(0, 2)];
    p.frequency = rng.uniform(0.3, 1.0);
    if (kind == "wave") p.amplitude = rng.uniform(0.3, 1.2);
    else if (kind == "reach") p.amplitude = rng.uniform(0.4, 1.4);
    else if (kind == "squat") p.amplitude = rng.uniform(0.1, 0.4);
    else if (kind == "walk_in_place") p.amplitude = rng.uniform(0.1, 0.35);
    else p.amplitude = 0.0;
    return p;
  };
  std::vector<MotionClip> clips;
  for (int i = 0; i < count; ++i) {
    const std::string kind = kinds[static_cast<std::size_t>(i) % kinds.size()];
    GenParams p = kind == "composite" ? GenParams{} : draw(kind);
    if (kind == "composite") {
      p.kind = "composite";
      p.parts = {draw("wave"), draw("reach")};
      for (auto& part : p.parts) part.duration = duration / 2;
    }
    p.heading = rng.uniform(-kPi, kPi);
    MotionClip c = generate(p, m);
    c.name = kind + "_" + std::to_string(i);
    clips.push_back(std::move(c));
  }
  return clips;
}

}  // namespace symmimic
