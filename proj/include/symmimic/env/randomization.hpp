#pragma once

#include "symmimic/core/rng.hpp"
#include "symmimic/env/config.hpp"
#include "symmimic/sim/step.hpp"

namespace symmimic {

/// Per-episode physics, actuation and goal perturbations.
struct RandomizedParams {
  std::vector<double> foot_friction;  // per foot
  Vec3 com_bias = Vec3::Zero();       // pelvis COM offset, m
  VecX mass_scale;                    // per link
  VecX kp_scale;                      // per joint
  VecX kd_scale;
  VecX torque_scale;
  int delay = 0;                      // control steps
  Vec3 goal_offset = Vec3::Zero();    // added to observed goal keypoints, m

  Json to_json() const {
    return {{"foot_friction", foot_friction},   {"com_bias", vec3_to_json(com_bias)},
            {"mass_scale", vec_to_json(mass_scale)}, {"kp_scale", vec_to_json(kp_scale)},
            {"kd_scale", vec_to_json(kd_scale)},     {"torque_scale", vec_to_json(torque_scale)},
            {"delay", delay},                        {"goal_offset", vec3_to_json(goal_offset)}};
  }
  static RandomizedParams from_json(const Json& j) {
    RandomizedParams p;
    p.foot_friction = j.at("foot_friction").get<std::vector<double>>();
    p.com_bias = vec3_from_json(j.at("com_bias"), "com_bias");
    p.mass_scale = vec_from_json(j.at("mass_scale"));
    p.kp_scale = vec_from_json(j.at("kp_scale"));
    p.kd_scale = vec_from_json(j.at("kd_scale"));
    p.torque_scale = vec_from_json(j.at("torque_scale"));
    p.delay = j.at("delay").get<int>();
    p.goal_offset = vec3_from_json(j.at("goal_offset"), "goal_offset");
    return p;
  }
};

inline RandomizedParams nominal_params(const RobotModel& m, double friction) {
  RandomizedParams p;
  p.foot_friction.assign(m.feet.size(), friction);
  p.mass_scale = VecX::Ones(m.num_links());
  p.kp_scale = VecX::Ones(m.num_joints());
  p.kd_scale = VecX::Ones(m.num_joints());
  p.torque_scale = VecX::Ones(m.num_joints());
  return p;
}

/// Draws every enabled field from its range; disabled fields stay nominal.
/// The draw order is fixed so equal seeds give equal parameters.
inline RandomizedParams sample_randomization(const RobotModel& m, const DomainRandConfig& c, double nominal_friction,
                                             Rng& rng) {
  RandomizedParams p = nominal_params(m, nominal_friction);
  auto draw = [&](const Range& r) { return rng.uniform(r.lo, r.hi); };
  if (c.friction) {
    // One ground friction value, seen by every foot.
    const double mu = draw(c.friction_range);
    p.foot_friction.assign(m.feet.size(), mu);
  }
  if (c.com && !m.fixed_base)
    for (int k = 0; k < 3; ++k) p.com_bias[k] = draw(c.com_offset);
  if (c.link_mass)
    for (int l = 0; l < m.num_links(); ++l) p.mass_scale[l] = draw(c.mass_scale);
  if (c.gains) {
    for (int j = 0; j < m.num_joints(); ++j) p.kp_scale[j] = draw(c.kp_scale);
    for (int j = 0; j < m.num_joints(); ++j) p.kd_scale[j] = draw(c.kd_scale);
  }
  if (c.motor_strength)
    for (int j = 0; j < m.num_joints(); ++j) p.torque_scale[j] = draw(c.torque_scale);
  if (c.delay) p.delay = rng.integer(0, c.max_delay);
  if (c.goal_offset)
    for (int k = 0; k < 3; ++k) p.goal_offset[k] = draw(c.goal_offset_range);
  return p;
}

/// Parameters of the mirrored episode.
inline RandomizedParams mirror_params(const RobotModel& m, const RandomizedParams& p) {
  const auto& sym = m.symmetry;
  RandomizedParams r = p;
  for (std::size_t i = 0; i < p.foot_friction.size(); ++i) r.foot_friction[i] = p.foot_friction[sym.foot_perm[i]];
  r.com_bias = mirror_vector(p.com_bias);
  for (int l = 0; l < m.num_links(); ++l) r.mass_scale[l] = p.mass_scale[sym.link_perm[l]];
  r.kp_scale = permute_joint_vector(sym, p.kp_scale);
  r.kd_scale = permute_joint_vector(sym, p.kd_scale);
  r.torque_scale = permute_joint_vector(sym, p.torque_scale);
  r.goal_offset = mirror_vector(p.goal_offset);
  return r;
}

/// The model the simulator integrates: scaled link masses/inertias and a
/// shifted pelvis COM.
inline RobotModel randomized_model(const RobotModel& nominal, const RandomizedParams& p) {
  RobotModel m = nominal;
  for (int l = 0; l < m.num_links(); ++l) {
    m.links[l].mass *= p.mass_scale[l];
    m.links[l].inertia *= p.mass_scale[l];
  }
  m.links[0].com += p.com_bias;
  return m;
}

inline StepParams randomized_step_params(const RobotModel& nominal, const RandomizedParams& p) {
  StepParams sp = default_step_params(nominal);
  sp.gains.kp = sp.gains.kp.cwiseProduct(p.kp_scale);
  sp.gains.kd = sp.gains.kd.cwiseProduct(p.kd_scale);
  sp.torque_scale = p.torque_scale;
  if (!nominal.feet.empty()) sp.foot_friction = p.foot_friction;
  return sp;
}

}  // namespace symmimic
