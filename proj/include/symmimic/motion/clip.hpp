#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/json_util.hpp"
#include "symmimic/core/math.hpp"
#include "symmimic/model/robot_model.hpp"

namespace symmimic {

struct MotionFrame {
  Vec3 root_position = Vec3::Zero();
  Quat root_orientation = Quat::Identity();
  VecX q;
};

/// Reference motion in robot joint space. `provenance` is {"source": "clean"}
/// or {"source": "corrupted", "corruptions": [...], "seed": s, "log": [...]}.
struct MotionClip {
  std::string name;
  double fps = 50.0;
  std::vector<std::string> joint_names;
  std::vector<MotionFrame> frames;
  Json provenance = Json{{"source", "clean"}};

  int num_frames() const { return static_cast<int>(frames.size()); }
  int num_joints() const { return frames.empty() ? 0 : static_cast<int>(frames.front().q.size()); }
  /// Time of the last frame.
  double duration() const { return frames.size() < 2 ? 0.0 : (frames.size() - 1) / fps; }
  bool is_clean() const { return provenance.value("source", "clean") == "clean"; }
};

inline void validate(const MotionClip& c) {
  if (!(c.fps > 0.0)) throw ValidationError("clip '" + c.name + "': fps must be positive");
  if (c.frames.size() < 2) throw ValidationError("clip '" + c.name + "': >= 2 frames required");
  const auto n = c.frames.front().q.size();
  if (!c.joint_names.empty() && c.joint_names.size() != static_cast<std::size_t>(n))
    throw ValidationError("clip '" + c.name + "': joint name count does not match frame 0");
  for (std::size_t i = 0; i < c.frames.size(); ++i) {
    const auto& f = c.frames[i];
    if (f.q.size() != n)
      throw ValidationError("clip '" + c.name + "': frame " + std::to_string(i) + " has " +
                            std::to_string(f.q.size()) + " joints, expected " + std::to_string(n));
    if (std::abs(f.root_orientation.norm() - 1.0) > 1e-6)
      throw ValidationError("clip '" + c.name + "': frame " + std::to_string(i) + " quaternion is not unit norm");
    if (!f.q.allFinite() || !f.root_position.allFinite())
      throw ValidationError("clip '" + c.name + "': frame " + std::to_string(i) + " is not finite");
  }
}

/// Checks the clip's joint names against the model.
inline void check_compatible(const MotionClip& c, const RobotModel& m) {
  if (c.num_joints() != m.num_joints())
    throw DataError("clip '" + c.name + "' has " + std::to_string(c.num_joints()) + " joints, model '" + m.name +
                    "' has " + std::to_string(m.num_joints()));
  for (int j = 0; j < m.num_joints() && j < static_cast<int>(c.joint_names.size()); ++j)
    if (c.joint_names[j] != m.joints[j].name)
      throw DataError("clip '" + c.name + "': joint " + std::to_string(j) + " is '" + c.joint_names[j] +
                      "', model expects '" + m.joints[j].name + "'");
}

inline std::vector<std::string> joint_names(const RobotModel& m) {
  std::vector<std::string> n;
  for (const auto& j : m.joints) n.push_back(j.name);
  return n;
}

inline Json clip_to_json(const MotionClip& c) {
  Json frames = Json::array();
  for (std::size_t i = 0; i < c.frames.size(); ++i) {
    const auto& f = c.frames[i];
    frames.push_back({{"t", static_cast<double>(i) / c.fps},
                      {"root_pos", vec3_to_json(f.root_position)},
                      {"root_quat", quat_to_json(f.root_orientation)},
                      {"q", vec_to_json(f.q)}});
  }
  return {{"name", c.name}, {"fps", c.fps}, {"joints", c.joint_names}, {"frames", frames}, {"provenance", c.provenance}};
}

inline MotionClip clip_from_json(const Json& j) {
  MotionClip c;
  try {
    check_keys(j, {"name", "fps", "joints", "frames", "provenance"}, "motion");
    c.name = j.value("name", std::string("clip"));
    c.fps = j.at("fps").get<double>();
    c.joint_names = j.at("joints").get<std::vector<std::string>>();
    for (const auto& fj : j.at("frames")) {
      check_keys(fj, {"t", "root_pos", "root_quat", "q"}, "motion frame");
      MotionFrame f;
      f.root_position = vec3_from_json(fj.at("root_pos"), "root_pos");
      f.root_orientation = quat_from_json(fj.at("root_quat"), "root_quat");
      f.q = vec_from_json(fj.at("q"));
      c.frames.push_back(std::move(f));
    }
    if (j.contains("provenance")) c.provenance = j.at("provenance");
  } catch (const Json::exception& e) {
    throw ParseError(std::string("motion document: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  }
  validate(c);
  return c;
}

inline void save_clip(const MotionClip& c, const std::filesystem::path& path) {
  validate(c);
  write_json_file(path, clip_to_json(c));
}

inline MotionClip load_clip(const std::filesystem::path& path) { return clip_from_json(read_json_file(path)); }

/// Linear interpolation of positions/angles and slerp of the root orientation.
inline MotionFrame interpolate(const MotionFrame& a, const MotionFrame& b, double s) {
  MotionFrame f;
  f.root_position = (1.0 - s) * a.root_position + s * b.root_position;
  f.root_orientation = a.root_orientation.slerp(s, b.root_orientation).normalized();
  f.q = (1.0 - s) * a.q + s * b.q;
  return f;
}

/// Frame at time t (clamped to the clip), interpolated between neighbours.
inline MotionFrame sample(const MotionClip& c, double t) {
  const double x = clamp(t * c.fps, 0.0, static_cast<double>(c.frames.size() - 1));
  const auto i = static_cast<std::size_t>(std::floor(x));
  if (i + 1 >= c.frames.size()) return c.frames.back();
  const double s = x - static_cast<double>(i);
  if (s == 0.0) return c.frames[i];
  return interpolate(c.frames[i], c.frames[i + 1], s);
}

/// Resamples to `target_fps`; frame count is round(duration * fps) + 1.
inline MotionClip resample(const MotionClip& c, double target_fps) {
  if (!(target_fps > 0.0)) throw ConfigError("resample: target fps must be positive");
  if (target_fps == c.fps) return c;
  MotionClip out = c;
  out.fps = target_fps;
  out.frames.clear();
  const auto n = static_cast<std::size_t>(std::llround(c.duration() * target_fps)) + 1;
  for (std::size_t i = 0; i < std::max<std::size_t>(n, 2); ++i) out.frames.push_back(sample(c, i / target_fps));
  return out;
}

/// Loads every *.json clip in `dir`, in file-name order. Run-config snapshots
/// (*.resolved.json) written next to generated clips are skipped.
inline std::vector<MotionClip> load_dataset(const std::filesystem::path& dir) {
  if (std::filesystem::is_regular_file(dir)) return {load_clip(dir)};
  if (!std::filesystem::is_directory(dir)) throw DataError("motion dataset not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    const bool snapshot = name.size() >= 14 && name.compare(name.size() - 14, 14, ".resolved.json") == 0;
    if (e.is_regular_file() && e.path().extension() == ".json" && !snapshot) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<MotionClip> clips;
  for (const auto& f : files) clips.push_back(load_clip(f));
  return clips;
}

/// Writes one file per clip, named after the clip (index-suffixed on clashes).
inline std::vector<std::filesystem::path> save_dataset(const std::vector<MotionClip>& clips,
                                                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> out;
  std::vector<std::string> used;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    std::string stem = clips[i].name.empty() ? "clip" : clips[i].name;
    if (std::find(used.begin(), used.end(), stem) != used.end()) stem += "_" + std::to_string(i);
    used.push_back(stem);
    out.push_back(dir / (stem + ".json"));
    save_clip(clips[i], out.back());
  }
  return out;
}

}  // namespace symmimic
