#pragma once

#include <limits>
#include <vector>

#include "symmimic/model/kinematics.hpp"
#include "symmimic/sim/dynamics.hpp"
#include "symmimic/sim/state.hpp"

namespace symmimic {

struct FootState {
  Vec3 force = Vec3::Zero();     // summed over the foot's spheres, N
  double height = 0.0;           // lowest sphere bottom above ground, m
  Vec3 velocity = Vec3::Zero();  // foot link origin, world
  Vec3 gravity = Vec3::Zero();   // projected gravity in the foot frame
};

/// Kinematic quantities of the robot derived once per control step and shared
/// by rewards, observations, termination and metrics.
struct BodyState {
  Pose root;
  Vec3 gravity = Vec3::Zero();        // projected gravity, base frame
  Vec3 root_angvel_local = Vec3::Zero();
  Points keypoints;                   // world
  Points keypoints_local;             // pelvis heading frame
  std::vector<Quat> orientations;     // per keypoint
  Points linear_velocity;             // per keypoint, world
  Points angular_velocity;            // per keypoint, world
  std::vector<FootState> feet;
};

inline BodyState body_state(const RobotModel& model, const SimState& s) {
  BodyState b;
  const DynamicsFrame f = dynamics_frame(model, s);
  const auto vel = link_velocities(model, f, s);
  b.root = s.base_pose();
  b.gravity = projected_gravity(s.base_orientation);
  b.root_angvel_local = s.base_orientation.conjugate() * s.base_angular_velocity;
  b.keypoints = keypoints_global(model, f.poses);
  b.keypoints_local = keypoints_local(b.keypoints, b.root);
  b.orientations = keypoint_orientations(model, f.poses);
  const int K = model.num_keypoints();
  b.linear_velocity.resize(3, K);
  b.angular_velocity.resize(3, K);
  for (int k = 0; k < K; ++k) {
    const int l = model.keypoints[k].link;
    b.linear_velocity.col(k) = point_velocity(vel[l], b.keypoints.col(k));
    b.angular_velocity.col(k) = vel[l].head<3>();
  }
  b.feet.resize(model.feet.size());
  for (std::size_t i = 0; i < model.feet.size(); ++i) {
    const int link = model.feet[i];
    FootState& ft = b.feet[i];
    const Pose& p = f.poses[link];
    ft.velocity = point_velocity(vel[link], p.position);
    ft.gravity = projected_gravity(p.orientation);
    double lowest = std::numeric_limits<double>::infinity();
    for (int sp : model.spheres_of_link(link)) {
      const auto& cs = model.contact_spheres[sp];
      lowest = std::min(lowest, p.apply(cs.offset).z() - cs.radius);
      if (static_cast<std::size_t>(sp) < s.contact_forces.size()) ft.force += s.contact_forces[sp];
    }
    ft.height = std::isfinite(lowest) ? lowest : p.position.z();
  }
  return b;
}

}  // namespace symmimic
