#pragma once

#include <limits>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/math.hpp"
#include "symmimic/model/robot_model.hpp"
#include "symmimic/sim/dynamics.hpp"
#include "symmimic/sim/state.hpp"

namespace symmimic {

struct GroundContactResult {
  Vec3 force = Vec3::Zero();  // N, world frame, applied to the robot
  bool in_contact = false;
  double slip_speed = 0.0;    // m/s, tangential speed of the sphere point
};

struct SphereKinematics {
  int link;
  Vec3 point;          // lowest point of the sphere
  Vec3 velocity;       // velocity of that point
  double penetration;  // radius - center height
};

inline std::vector<SphereKinematics> sphere_kinematics(const RobotModel& model, const DynamicsFrame& f,
                                                       const SimState& s) {
  const auto v = link_velocities(model, f, s);
  std::vector<SphereKinematics> out;
  out.reserve(model.contact_spheres.size());
  for (const auto& sp : model.contact_spheres) {
    const Vec3 c = f.poses[sp.link].apply(sp.offset);
    const Vec3 x = c - sp.radius * Vec3::UnitZ();
    out.push_back({sp.link, x, point_velocity(v[sp.link], x), sp.radius - c.z()});
  }
  return out;
}

/// Penalty contact evaluated explicitly at the current state:
/// normal = k*penetration - c*vz (clamped >= 0), tangential opposes slip with
/// viscous magnitude clamped to mu * normal.
inline GroundContactResult penalty_contact(const ContactConfig& c, double penetration, const Vec3& velocity) {
  GroundContactResult r;
  r.slip_speed = Vec3(velocity.x(), velocity.y(), 0.0).norm();
  if (penetration <= 0.0) return r;
  r.in_contact = true;
  const double fn = std::max(0.0, c.stiffness * penetration - c.damping * velocity.z());
  Vec3 ft(-c.tangential_damping * velocity.x(), -c.tangential_damping * velocity.y(), 0.0);
  const double cap = c.friction * fn;
  const double mag = ft.norm();
  if (mag > cap) ft *= (mag > 0.0 ? cap / mag : 0.0);
  r.force = Vec3(ft.x(), ft.y(), fn);
  return r;
}

inline std::vector<GroundContactResult> contact_forces(const RobotModel& model, const SimState& s,
                                                       const ContactConfig& config) {
  const DynamicsFrame f = dynamics_frame(model, s);
  std::vector<GroundContactResult> out;
  for (const auto& sk : sphere_kinematics(model, f, s)) out.push_back(penalty_contact(config, sk.penetration, sk.velocity));
  return out;
}

/// Friction coefficient per contact sphere. `foot_friction` (one per model
/// foot, may be empty) overrides the global coefficient for that foot's spheres.
inline std::vector<double> sphere_friction(const RobotModel& model, const ContactConfig& config,
                                           const std::vector<double>& foot_friction) {
  std::vector<double> mu(model.contact_spheres.size(), config.friction);
  if (foot_friction.empty()) return mu;
  if (foot_friction.size() != model.feet.size()) throw ValidationError("foot friction count does not match feet");
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t k = 0; k < model.feet.size(); ++k)
      if (model.contact_spheres[i].link == model.feet[k]) mu[i] = foot_friction[k];
  return mu;
}

/// Shifts the base vertically so the lowest contact sphere just touches the ground.
inline void place_on_ground(const RobotModel& model, SimState& s, double clearance = 0.0) {
  if (model.contact_spheres.empty()) return;
  const auto poses = forward_kinematics(model, s.base_pose(), s.q);
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& sp : model.contact_spheres) lowest = std::min(lowest, poses[sp.link].apply(sp.offset).z() - sp.radius);
  s.base_position.z() += clearance - lowest;
}

}  // namespace symmimic
