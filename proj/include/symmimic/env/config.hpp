#pragma once

#include <string>

#include "symmimic/core/error.hpp"
#include "symmimic/core/json_util.hpp"
#include "symmimic/sim/state.hpp"

namespace symmimic {

struct EnvConfig {
  double control_hz = 50.0;
  int history_length = 10;  // proprioceptive steps seen by the student
  int future_length = 10;   // goal frames seen by the student
  double termination_distance = 0.5;  // m, mean keypoint deviation
  double termination_gravity_xy = 0.7;  // |g_x| or |g_y| of the unit projected gravity
  bool terminate = true;
  bool resample_on_motion_end = true;
  bool random_start = true;  // reset at a uniformly drawn frame of the clip
  int max_episode_steps = 1000;
  // "keypoints" conditions the teacher on goal keypoints, "dofs" on goal joint angles.
  std::string goal_representation = "keypoints";
  SimConfig sim;
};

struct RewardConfig {
  double w_joint_pos = 32.0;
  double w_joint_vel = 16.0;
  double w_body_pos = 50.0;
  double w_body_rot = 20.0;
  double w_action_rate = -1.0;
  double w_energy = -1e-6;
  double w_dof_acc = -3e-6;
  double w_dof_limits = -100.0;
  double w_feet_slip = -5.0;
  double w_orientation = -50.0;
  double w_feet_contact = -0.03;
  double w_feet_orientation = -62.5;
  double w_feet_max_height = -2500.0;
  double w_feet_air_time = 1000.0;
  double w_termination = -200.0;
  double w_alive = 20.0;

  double sigma_joint_pos = 0.5;
  double sigma_joint_vel = 10.0;
  double sigma_body_pos = 0.3;
  double sigma_body_rot = 1.0;

  // Keypoint classes (end effector / upper / lower) and joint classes (upper / lower).
  double kp_end_effector = 4.0;
  double kp_upper = 2.0;
  double kp_lower = 1.0;
  double joint_upper = 2.0;
  double joint_lower = 1.0;
  bool class_weights = true;  // false: uniform weights

  double feet_height_target = 0.1;  // m
  double feet_air_time_target = 0.25;  // s
  double contact_threshold = 1.0;  // N
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct DomainRandConfig {
  bool push = true;
  double push_interval = 5.0;  // s
  Range push_velocity{-1.0, 1.0};  // m/s, xy
  bool friction = true;
  Range friction_range{0.4, 1.25};
  bool com = true;
  Range com_offset{-0.1, 0.1};  // m per axis, pelvis
  bool link_mass = true;
  Range mass_scale{0.7, 1.3};
  bool gains = true;
  Range kp_scale{0.75, 1.25};
  Range kd_scale{0.75, 1.25};
  bool motor_strength = true;
  Range torque_scale{0.5, 1.5};
  bool delay = true;
  int max_delay = 3;  // steps, uniform over {0..max_delay}
  bool goal_offset = true;
  Range goal_offset_range{-0.02, 0.02};  // m per axis

  bool obs_noise = true;
  double noise_joint_pos = 0.01;
  double noise_joint_vel = 0.1;
  double noise_root_angvel = 0.5;
  double noise_gravity = 0.1;
  double noise_local_pos = 0.01;
  double noise_global_pos = 0.01;
  double noise_global_quat = 0.01;
  double noise_global_linvel = 0.2;
  double noise_global_angvel = 0.5;
  double noise_goal = 0.05;

  /// Everything disabled: nominal physics, no noise, no pushes.
  static DomainRandConfig none() {
    DomainRandConfig c;
    c.push = c.friction = c.com = c.link_mass = c.gains = c.motor_strength = c.delay = c.goal_offset = false;
    c.obs_noise = false;
    return c;
  }
};

inline void validate(const EnvConfig& c) {
  if (!(c.control_hz > 0.0)) throw ConfigError("env.control_hz must be positive");
  if (c.history_length < 1 || c.future_length < 1) throw ConfigError("env history/future lengths must be >= 1");
  if (!(c.termination_distance > 0.0) || !(c.termination_gravity_xy > 0.0))
    throw ConfigError("env termination thresholds must be positive");
  if (c.max_episode_steps < 1) throw ConfigError("env.max_episode_steps must be >= 1");
  if (c.goal_representation != "keypoints" && c.goal_representation != "dofs")
    throw ConfigError("env.goal_representation must be 'keypoints' or 'dofs'");
  validate(c.sim);
  if (std::abs(c.sim.control_dt() * c.control_hz - 1.0) > 1e-9)
    throw ConfigError("env.control_hz must equal 1 / (sim.physics_dt * sim.substeps_per_control)");
}

inline void validate(const RewardConfig& c) {
  for (double s : {c.sigma_joint_pos, c.sigma_joint_vel, c.sigma_body_pos, c.sigma_body_rot})
    if (!(s > 0.0)) throw ConfigError("reward sigmas must be positive");
  for (double w : {c.kp_end_effector, c.kp_upper, c.kp_lower, c.joint_upper, c.joint_lower})
    if (!(w > 0.0)) throw ConfigError("reward class weights must be positive");
}

inline void validate(const DomainRandConfig& c) {
  for (const Range* r : {&c.push_velocity, &c.friction_range, &c.com_offset, &c.mass_scale, &c.kp_scale, &c.kd_scale,
                         &c.torque_scale, &c.goal_offset_range})
    if (!(r->lo <= r->hi)) throw ConfigError("randomization range lower bound exceeds upper bound");
  if (c.friction_range.lo < 0.0 || c.mass_scale.lo <= 0.0 || c.torque_scale.lo < 0.0)
    throw ConfigError("randomization scale ranges must be positive");
  if (c.max_delay < 0) throw ConfigError("randomization.max_delay must be >= 0");
  if (!(c.push_interval > 0.0)) throw ConfigError("randomization.push_interval must be positive");
}

inline Json to_json(const Range& r) { return Json::array({r.lo, r.hi}); }

inline Range range_from_json(const Json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(ctx + ": expected [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

// Field tables keep the JSON readers and writers in one place per struct.
#define SYMMIMIC_ENV_FIELDS(X)                                                                                     \
  X(control_hz) X(history_length) X(future_length) X(termination_distance) X(termination_gravity_xy) X(terminate) \
      X(resample_on_motion_end) X(random_start) X(max_episode_steps) X(goal_representation)
#define SYMMIMIC_REWARD_FIELDS(X)                                                                                  \
  X(w_joint_pos) X(w_joint_vel) X(w_body_pos) X(w_body_rot) X(w_action_rate) X(w_energy) X(w_dof_acc)             \
      X(w_dof_limits) X(w_feet_slip) X(w_orientation) X(w_feet_contact) X(w_feet_orientation) X(w_feet_max_height) \
          X(w_feet_air_time) X(w_termination) X(w_alive) X(sigma_joint_pos) X(sigma_joint_vel) X(sigma_body_pos)   \
              X(sigma_body_rot) X(kp_end_effector) X(kp_upper) X(kp_lower) X(joint_upper) X(joint_lower)           \
                  X(class_weights) X(feet_height_target) X(feet_air_time_target) X(contact_threshold)
#define SYMMIMIC_RAND_SCALARS(X)                                                                                   \
  X(push) X(push_interval) X(friction) X(com) X(link_mass) X(gains) X(motor_strength) X(delay) X(max_delay)        \
      X(goal_offset) X(obs_noise) X(noise_joint_pos) X(noise_joint_vel) X(noise_root_angvel) X(noise_gravity)      \
          X(noise_local_pos) X(noise_global_pos) X(noise_global_quat) X(noise_global_linvel)                       \
              X(noise_global_angvel) X(noise_goal)
#define SYMMIMIC_RAND_RANGES(X)                                                                                    \
  X(push_velocity) X(friction_range) X(com_offset) X(mass_scale) X(kp_scale) X(kd_scale) X(torque_scale)          \
      X(goal_offset_range)

inline Json to_json(const EnvConfig& c) {
  Json j;
#define X(f) j[#f] = c.f;
  SYMMIMIC_ENV_FIELDS(X)
#undef X
  j["sim"] = to_json(c.sim);
  return j;
}

inline EnvConfig env_config_from_json(const Json& j, EnvConfig c = {}) {
  if (!j.is_object()) throw ConfigError("env: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    bool known = k == "sim";
#define X(f) known = known || k == #f;
    SYMMIMIC_ENV_FIELDS(X)
#undef X
    if (!known) throw ConfigError("env: unknown key '" + k + "'");
  }
  try {
#define X(f) read_opt(j, #f, c.f);
    SYMMIMIC_ENV_FIELDS(X)
#undef X
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("env: ") + e.what());
  }
  if (j.contains("sim")) c.sim = sim_config_from_json(j.at("sim"), c.sim);
  validate(c);
  return c;
}

inline Json to_json(const RewardConfig& c) {
  Json j;
#define X(f) j[#f] = c.f;
  SYMMIMIC_REWARD_FIELDS(X)
#undef X
  return j;
}

inline RewardConfig reward_config_from_json(const Json& j, RewardConfig c = {}) {
  if (!j.is_object()) throw ConfigError("reward: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
#define X(f) known = known || it.key() == #f;
    SYMMIMIC_REWARD_FIELDS(X)
#undef X
    if (!known) throw ConfigError("reward: unknown key '" + it.key() + "'");
  }
  try {
#define X(f) read_opt(j, #f, c.f);
    SYMMIMIC_REWARD_FIELDS(X)
#undef X
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("reward: ") + e.what());
  }
  validate(c);
  return c;
}

inline Json to_json(const DomainRandConfig& c) {
  Json j;
#define X(f) j[#f] = c.f;
  SYMMIMIC_RAND_SCALARS(X)
#undef X
#define X(f) j[#f] = to_json(c.f);
  SYMMIMIC_RAND_RANGES(X)
#undef X
  return j;
}

inline DomainRandConfig rand_config_from_json(const Json& j, DomainRandConfig c = {}) {
  if (!j.is_object()) throw ConfigError("randomization: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
#define X(f) known = known || it.key() == #f;
    SYMMIMIC_RAND_SCALARS(X)
    SYMMIMIC_RAND_RANGES(X)
#undef X
    if (!known) throw ConfigError("randomization: unknown key '" + it.key() + "'");
  }
  try {
#define X(f) read_opt(j, #f, c.f);
    SYMMIMIC_RAND_SCALARS(X)
#undef X
#define X(f) \
  if (j.contains(#f)) c.f = range_from_json(j.at(#f), "randomization." #f);
    SYMMIMIC_RAND_RANGES(X)
#undef X
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("randomization: ") + e.what());
  }
  validate(c);
  return c;
}

#undef SYMMIMIC_ENV_FIELDS
#undef SYMMIMIC_REWARD_FIELDS
#undef SYMMIMIC_RAND_SCALARS
#undef SYMMIMIC_RAND_RANGES

}  // namespace symmimic
