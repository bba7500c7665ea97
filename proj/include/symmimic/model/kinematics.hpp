#pragma once

#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/math.hpp"
#include "symmimic/model/robot_model.hpp"

namespace symmimic {

using LinkPoses = std::vector<Pose>;
using Points = Eigen::Matrix3Xd;  // one column per keypoint

/// World pose of every link. Throws ValidationError on a non-unit base
/// quaternion (|norm - 1| > 1e-6) or a joint vector of the wrong length.
inline LinkPoses forward_kinematics(const RobotModel& model, const Pose& base, const Eigen::Ref<const VecX>& q) {
  if (q.size() != model.num_joints())
    throw ValidationError("forward_kinematics: expected " + std::to_string(model.num_joints()) + " joint angles, got " +
                          std::to_string(q.size()));
  if (std::abs(base.orientation.norm() - 1.0) > 1e-6)
    throw ValidationError("forward_kinematics: base quaternion is not unit norm");
  LinkPoses poses(model.num_links());
  poses[0] = base;
  for (int j = 0; j < model.num_joints(); ++j) {
    const auto& jt = model.joints[j];
    const Pose& parent = poses[jt.parent];
    Pose& child = poses[jt.child];
    child.position = parent.position + parent.orientation * jt.origin;
    child.orientation = parent.orientation * axis_angle(jt.axis, q[j]);
  }
  return poses;
}

inline Points keypoints_global(const RobotModel& model, const LinkPoses& poses) {
  Points p(3, model.num_keypoints());
  for (int k = 0; k < model.num_keypoints(); ++k) {
    const auto& kp = model.keypoints[k];
    p.col(k) = poses[kp.link].apply(kp.offset);
  }
  return p;
}

/// Orientation of each keypoint (that of its link).
inline std::vector<Quat> keypoint_orientations(const RobotModel& model, const LinkPoses& poses) {
  std::vector<Quat> r(model.num_keypoints());
  for (int k = 0; k < model.num_keypoints(); ++k) r[k] = poses[model.keypoints[k].link].orientation;
  return r;
}

/// Heading frame: at the pelvis position, yawed like the pelvis, z up.
inline Pose heading_frame(const Pose& pelvis) { return {pelvis.position, yaw_quat(yaw_of(pelvis.orientation))}; }

/// Expresses world vectors in the heading frame of `pelvis` (no translation).
inline Points rotate_into_heading(const Points& world_vectors, const Pose& pelvis) {
  const Mat3 rt = yaw_quat(yaw_of(pelvis.orientation)).toRotationMatrix().transpose();
  return rt * world_vectors;
}

/// Keypoints relative to the pelvis heading frame.
inline Points keypoints_local(const Points& global, const Pose& pelvis) {
  const Mat3 rt = yaw_quat(yaw_of(pelvis.orientation)).toRotationMatrix().transpose();
  return rt * (global.colwise() - pelvis.position);
}

}  // namespace symmimic
