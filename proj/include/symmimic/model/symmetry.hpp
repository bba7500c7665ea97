#pragma once

#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/math.hpp"
#include "symmimic/model/kinematics.hpp"
#include "symmimic/model/robot_model.hpp"

namespace symmimic {

/// v'[i] = joint_sign[i] * v[joint_perm[i]].
inline VecX mirror_joint_vector(const SymmetryMap& map, const Eigen::Ref<const VecX>& v) {
  const auto n = static_cast<Eigen::Index>(map.joint_perm.size());
  if (v.size() != n)
    throw ValidationError("mirror_joint_vector: expected " + std::to_string(n) + " values, got " +
                          std::to_string(v.size()));
  VecX out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = map.joint_sign[i] * v[map.joint_perm[i]];
  return out;
}

/// Same permutation without the sign flip (for per-joint scale factors).
inline VecX permute_joint_vector(const SymmetryMap& map, const Eigen::Ref<const VecX>& v) {
  VecX out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[map.joint_perm[i]];
  return out;
}

/// Mirrors world-frame (or heading-frame) keypoint positions: permute and flip y.
inline Points mirror_points(const SymmetryMap& map, const Points& p) {
  Points out(3, p.cols());
  for (Eigen::Index k = 0; k < p.cols(); ++k) out.col(k) = mirror_vector(p.col(map.keypoint_perm[k]));
  return out;
}

struct BaseState {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
};

/// Reflection across the x-z plane: y position and y velocity negated,
/// orientation conjugated by diag(1,-1,1) (roll and yaw negated, pitch kept),
/// angular velocity x and z negated.
inline BaseState mirror_base_state(const BaseState& s) {
  return {mirror_vector(s.position), mirror_quat(s.orientation), mirror_vector(s.linear_velocity),
          mirror_axial(s.angular_velocity)};
}

}  // namespace symmimic
