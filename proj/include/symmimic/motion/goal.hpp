#pragma once

#include <vector>

#include "symmimic/model/kinematics.hpp"
#include "symmimic/model/symmetry.hpp"
#include "symmimic/motion/clip.hpp"

namespace symmimic {

/// One goal frame: FK of a clip frame plus finite-differenced velocities.
struct GoalFrame {
  Pose root;
  Vec3 root_linear_velocity = Vec3::Zero();   // world
  Vec3 root_angular_velocity = Vec3::Zero();  // world
  VecX q;
  VecX qd;
  Points keypoints;                // world, 3 x K
  std::vector<Quat> orientations;  // per keypoint
};

/// Goal quantities for every frame of a clip. Velocities use central
/// differences at the clip rate (one-sided at the ends).
struct GoalTrack {
  double fps = 50.0;
  std::vector<GoalFrame> frames;

  int num_frames() const { return static_cast<int>(frames.size()); }
  double duration() const { return frames.size() < 2 ? 0.0 : (frames.size() - 1) / fps; }
  /// Frame index nearest to time t, clamped to the track.
  int index_at(double t) const {
    const auto i = static_cast<long long>(std::llround(t * fps));
    return static_cast<int>(std::clamp<long long>(i, 0, num_frames() - 1));
  }
  const GoalFrame& at(int i) const { return frames[std::clamp(i, 0, num_frames() - 1)]; }
};

inline GoalTrack make_goal_track(const MotionClip& clip, const RobotModel& model) {
  validate(clip);
  check_compatible(clip, model);
  const int n = clip.num_frames();
  GoalTrack g;
  g.fps = clip.fps;
  g.frames.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& f = clip.frames[i];
    GoalFrame& out = g.frames[i];
    out.root = {f.root_position, f.root_orientation};
    out.q = f.q;
    const auto poses = forward_kinematics(model, out.root, f.q);
    out.keypoints = keypoints_global(model, poses);
    out.orientations = keypoint_orientations(model, poses);
  }
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - 1);
    const int b = std::min(n - 1, i + 1);
    const double inv_dt = clip.fps / (b - a);
    const auto& fa = clip.frames[a];
    const auto& fb = clip.frames[b];
    g.frames[i].qd = (fb.q - fa.q) * inv_dt;
    g.frames[i].root_linear_velocity = (fb.root_position - fa.root_position) * inv_dt;
    g.frames[i].root_angular_velocity = quat_log(fb.root_orientation * fa.root_orientation.conjugate()) * inv_dt;
  }
  return g;
}

/// Sagittal mirror of a goal frame.
inline GoalFrame mirror_goal_frame(const RobotModel& m, const GoalFrame& g) {
  GoalFrame out;
  const BaseState b = mirror_base_state({g.root.position, g.root.orientation, g.root_linear_velocity,
                                         g.root_angular_velocity});
  out.root = {b.position, b.orientation};
  out.root_linear_velocity = b.linear_velocity;
  out.root_angular_velocity = b.angular_velocity;
  out.q = mirror_joint_vector(m.symmetry, g.q);
  out.qd = mirror_joint_vector(m.symmetry, g.qd);
  out.keypoints = mirror_points(m.symmetry, g.keypoints);
  out.orientations.resize(g.orientations.size());
  for (std::size_t k = 0; k < g.orientations.size(); ++k)
    out.orientations[k] = mirror_quat(g.orientations[m.symmetry.keypoint_perm[k]]);
  return out;
}

/// Rigidly moves a track: rotate by `yaw` about the vertical through `pivot`,
/// then translate `pivot` to `target`.
inline GoalTrack transform_goal_track(const GoalTrack& g, double yaw, const Vec3& pivot, const Vec3& target) {
  const Quat r = yaw_quat(yaw);
  const Mat3 R = r.toRotationMatrix();
  GoalTrack out = g;
  for (auto& f : out.frames) {
    f.root.position = target + R * (f.root.position - pivot);
    f.root.orientation = (r * f.root.orientation).normalized();
    f.root_linear_velocity = R * f.root_linear_velocity;
    f.root_angular_velocity = R * f.root_angular_velocity;
    f.keypoints = (R * (f.keypoints.colwise() - pivot)).colwise() + target;
    for (auto& q : f.orientations) q = (r * q).normalized();
  }
  return out;
}

/// Aligns the track's first root pose with `root` in heading and horizontal
/// position; heights are left unchanged.
inline GoalTrack align_goal_track(const GoalTrack& g, const Pose& root) {
  const Pose& first = g.frames.front().root;
  const double yaw = yaw_of(root.orientation) - yaw_of(first.orientation);
  const Vec3 target(root.position.x(), root.position.y(), first.position.z());
  return transform_goal_track(g, yaw, first.position, target);
}

}  // namespace symmimic
