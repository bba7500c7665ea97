#pragma once

#include <optional>
#include <vector>

#include "symmimic/core/json_util.hpp"
#include "symmimic/core/math.hpp"
#include "symmimic/model/robot_model.hpp"
#include "symmimic/model/symmetry.hpp"

namespace symmimic {

/// Generalized positions/velocities of the floating-base chain. The base
/// linear and angular velocities are expressed in the world frame.
struct SimState {
  Vec3 base_position = Vec3::Zero();
  Quat base_orientation = Quat::Identity();
  VecX q;
  Vec3 base_linear_velocity = Vec3::Zero();
  Vec3 base_angular_velocity = Vec3::Zero();
  VecX qd;
  double time = 0.0;
  std::vector<Vec3> contact_forces;  // last substep, per contact sphere, N

  Pose base_pose() const { return {base_position, base_orientation}; }
  BaseState base_state() const {
    return {base_position, base_orientation, base_linear_velocity, base_angular_velocity};
  }
};

inline SimState make_state(const RobotModel& model) {
  SimState s;
  s.q = model.default_pose();
  s.qd = VecX::Zero(model.num_joints());
  s.contact_forces.assign(model.contact_spheres.size(), Vec3::Zero());
  return s;
}

/// Generalized velocity u = [v_base(3), omega_base(3), qd] (floating) or qd (fixed).
inline VecX generalized_velocity(const RobotModel& model, const SimState& s) {
  VecX u(model.num_dofs());
  int o = 0;
  if (!model.fixed_base) {
    u.segment<3>(0) = s.base_linear_velocity;
    u.segment<3>(3) = s.base_angular_velocity;
    o = 6;
  }
  u.segment(o, model.num_joints()) = s.qd;
  return u;
}

inline void set_generalized_velocity(const RobotModel& model, SimState& s, const Eigen::Ref<const VecX>& u) {
  int o = 0;
  if (!model.fixed_base) {
    s.base_linear_velocity = u.segment<3>(0);
    s.base_angular_velocity = u.segment<3>(3);
    o = 6;
  }
  s.qd = u.segment(o, model.num_joints());
}

inline bool state_is_finite(const SimState& s) {
  if (!s.base_position.allFinite() || !s.base_orientation.coeffs().allFinite()) return false;
  if (!s.base_linear_velocity.allFinite() || !s.base_angular_velocity.allFinite()) return false;
  if (!s.q.allFinite() || !s.qd.allFinite()) return false;
  for (const auto& f : s.contact_forces)
    if (!f.allFinite()) return false;
  return true;
}

/// Mirror of the full simulator state across the sagittal plane.
inline SimState mirror_state(const RobotModel& model, const SimState& s) {
  SimState m = s;
  const BaseState b = mirror_base_state(s.base_state());
  m.base_position = b.position;
  m.base_orientation = b.orientation;
  m.base_linear_velocity = b.linear_velocity;
  m.base_angular_velocity = b.angular_velocity;
  m.q = mirror_joint_vector(model.symmetry, s.q);
  m.qd = mirror_joint_vector(model.symmetry, s.qd);
  for (std::size_t i = 0; i < s.contact_forces.size(); ++i)
    m.contact_forces[i] = mirror_vector(s.contact_forces[model.symmetry.sphere_perm[i]]);
  return m;
}

struct PDGains {
  VecX kp;
  VecX kd;
};

inline PDGains default_gains(const RobotModel& model) {
  PDGains g{VecX(model.num_joints()), VecX(model.num_joints())};
  for (int j = 0; j < model.num_joints(); ++j) {
    g.kp[j] = model.joints[j].kp;
    g.kd[j] = model.joints[j].kd;
  }
  return g;
}

struct ContactConfig {
  double stiffness = 6.0e4;           // N/m
  double damping = 1.0e3;             // N s/m
  double tangential_damping = 3.0e3;  // N s/m, viscous approximation of stiction
  double friction = 1.0;              // Coulomb coefficient
};

struct SimConfig {
  double physics_dt = 1.0 / 200.0;
  int substeps_per_control = 4;
  double gravity = 9.81;
  ContactConfig contact;
  double action_scale = 0.25;
  double action_clip = 10.0;
  // Restores exact whole-body linear momentum balance after each substep.
  bool momentum_projection = true;

  double control_dt() const { return physics_dt * substeps_per_control; }
};

inline void validate(const SimConfig& c) {
  if (!(c.physics_dt > 0.0)) throw ConfigError("sim.physics_dt must be positive");
  if (c.substeps_per_control < 1) throw ConfigError("sim.substeps_per_control must be >= 1");
  if (c.contact.friction < 0.0) throw ConfigError("sim.contact.friction must be >= 0");
  if (c.contact.stiffness < 0.0 || c.contact.damping < 0.0 || c.contact.tangential_damping < 0.0)
    throw ConfigError("sim.contact parameters must be >= 0");
  if (!(c.action_clip > 0.0)) throw ConfigError("sim.action_clip must be positive");
}

inline Json to_json(const SimConfig& c) {
  return {{"physics_dt", c.physics_dt},
          {"substeps_per_control", c.substeps_per_control},
          {"gravity", c.gravity},
          {"contact",
           {{"stiffness", c.contact.stiffness},
            {"damping", c.contact.damping},
            {"tangential_damping", c.contact.tangential_damping},
            {"friction", c.contact.friction}}},
          {"action_scale", c.action_scale},
          {"action_clip", c.action_clip},
          {"momentum_projection", c.momentum_projection}};
}

inline SimConfig sim_config_from_json(const Json& j, SimConfig c = {}) {
  check_keys(j, {"physics_dt", "substeps_per_control", "gravity", "contact", "action_scale", "action_clip",
                 "momentum_projection"},
             "sim");
  read_opt(j, "physics_dt", c.physics_dt);
  read_opt(j, "substeps_per_control", c.substeps_per_control);
  read_opt(j, "gravity", c.gravity);
  read_opt(j, "action_scale", c.action_scale);
  read_opt(j, "action_clip", c.action_clip);
  read_opt(j, "momentum_projection", c.momentum_projection);
  if (j.contains("contact")) {
    const auto& cj = j.at("contact");
    check_keys(cj, {"stiffness", "damping", "tangential_damping", "friction"}, "sim.contact");
    read_opt(cj, "stiffness", c.contact.stiffness);
    read_opt(cj, "damping", c.contact.damping);
    read_opt(cj, "tangential_damping", c.contact.tangential_damping);
    read_opt(cj, "friction", c.contact.friction);
  }
  validate(c);
  return c;
}

inline Json state_to_json(const SimState& s) {
  Json f = Json::array();
  for (const auto& v : s.contact_forces) f.push_back(vec3_to_json(v));
  return {{"base_position", vec3_to_json(s.base_position)},
          {"base_orientation", quat_to_json(s.base_orientation)},
          {"q", vec_to_json(s.q)},
          {"base_linear_velocity", vec3_to_json(s.base_linear_velocity)},
          {"base_angular_velocity", vec3_to_json(s.base_angular_velocity)},
          {"qd", vec_to_json(s.qd)},
          {"time", s.time},
          {"contact_forces", f}};
}

inline SimState state_from_json(const Json& j) {
  SimState s;
  s.base_position = vec3_from_json(j.at("base_position"), "base_position");
  s.base_orientation = quat_from_json(j.at("base_orientation"), "base_orientation");
  s.q = vec_from_json(j.at("q"));
  s.base_linear_velocity = vec3_from_json(j.at("base_linear_velocity"), "base_linear_velocity");
  s.base_angular_velocity = vec3_from_json(j.at("base_angular_velocity"), "base_angular_velocity");
  s.qd = vec_from_json(j.at("qd"));
  s.time = j.at("time").get<double>();
  for (const auto& f : j.at("contact_forces")) s.contact_forces.push_back(vec3_from_json(f, "contact_forces"));
  return s;
}

}  // namespace symmimic
