#pragma once

#include <array>
#include <string>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/env/body.hpp"
#include "symmimic/env/config.hpp"
#include "symmimic/motion/goal.hpp"

namespace symmimic {

/// exp(-sum_j w_j e_j / sigma^2) with w normalized to sum 1.
inline double weighted_exp_reward(const Eigen::Ref<const VecX>& errors, const Eigen::Ref<const VecX>& weights,
                                  double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("weighted_exp_reward: sigma must be positive");
  if (errors.size() != weights.size()) throw ValidationError("weighted_exp_reward: size mismatch");
  const double wsum = weights.sum();
  if (!(wsum > 0.0)) throw ValidationError("weighted_exp_reward: weights must have a positive sum");
  return std::exp(-weights.dot(errors) / (wsum * sigma * sigma));
}

/// Unnormalized class weight of every keypoint.
inline VecX keypoint_weights(const RobotModel& m, const RewardConfig& c) {
  VecX w(m.num_keypoints());
  for (int k = 0; k < m.num_keypoints(); ++k) {
    if (!c.class_weights) {
      w[k] = 1.0;
      continue;
    }
    switch (m.keypoints[k].weight_class) {
      case WeightClass::kEndEffector: w[k] = c.kp_end_effector; break;
      case WeightClass::kUpper: w[k] = c.kp_upper; break;
      case WeightClass::kLower: w[k] = c.kp_lower; break;
    }
  }
  return w;
}

/// Unnormalized class weight of every joint; end-effector joints count as upper.
inline VecX joint_weights(const RobotModel& m, const RewardConfig& c) {
  VecX w(m.num_joints());
  for (int j = 0; j < m.num_joints(); ++j)
    w[j] = !c.class_weights ? 1.0 : m.joints[j].weight_class == WeightClass::kLower ? c.joint_lower : c.joint_upper;
  return w;
}

// Air-time bookkeeping per foot. A step starts when the contact force drops
// below the threshold and ends at the next touchdown.
struct FootPhase {
  bool in_contact = true;
  double air_time = 0.0;
  double max_height = 0.0;
};

struct FootEvent {
  bool in_air = false;
  double max_height = 0.0;  // since lift-off
  bool first_step = false;  // touchdown on this step
  double air_time = 0.0;    // duration of the step that just ended
};

inline std::vector<FootEvent> update_feet(std::vector<FootPhase>& phases, const BodyState& body, double dt,
                                          double threshold) {
  if (phases.size() != body.feet.size()) phases.assign(body.feet.size(), FootPhase{});
  std::vector<FootEvent> ev(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) {
    auto& p = phases[i];
    const auto& f = body.feet[i];
    if (f.force.norm() > threshold) {
      if (!p.in_contact) {
        ev[i].first_step = true;
        ev[i].air_time = p.air_time;
      }
      p = FootPhase{};
    } else {
      p.in_contact = false;
      p.air_time += dt;
      p.max_height = std::max(p.max_height, f.height);
      ev[i].in_air = true;
      ev[i].max_height = p.max_height;
    }
  }
  return ev;
}

enum RewardTerm : int {
  kJointPos,
  kJointVel,
  kBodyPos,
  kBodyRot,
  kActionRate,
  kEnergy,
  kDofAcc,
  kDofLimits,
  kFeetSlip,
  kOrientation,
  kFeetContact,
  kFeetOrientation,
  kFeetMaxHeight,
  kFeetAirTime,
  kTermination,
  kAlive,
  kNumRewardTerms
};

inline const std::array<const char*, kNumRewardTerms>& reward_term_names() {
  static const std::array<const char*, kNumRewardTerms> names = {
      "tracking_joint_pos", "tracking_joint_vel", "tracking_body_pos", "tracking_body_rot",
      "action_rate",        "energy",             "dof_acc",           "dof_limits",
      "feet_slip",          "orientation",        "feet_contact",      "feet_orientation",
      "feet_max_height",    "feet_air_time",      "termination",       "alive"};
  return names;
}

inline std::array<double, kNumRewardTerms> reward_weights(const RewardConfig& c) {
  return {c.w_joint_pos,   c.w_joint_vel,    c.w_body_pos,         c.w_body_rot,         c.w_action_rate,
          c.w_energy,      c.w_dof_acc,      c.w_dof_limits,       c.w_feet_slip,        c.w_orientation,
          c.w_feet_contact, c.w_feet_orientation, c.w_feet_max_height, c.w_feet_air_time, c.w_termination,
          c.w_alive};
}

struct RewardTerms {
  std::array<double, kNumRewardTerms> value{};     // raw term
  std::array<double, kNumRewardTerms> weighted{};  // weight * raw
  double total = 0.0;

  double operator[](RewardTerm t) const { return value[t]; }
  Json to_json() const {
    Json j;
    for (int i = 0; i < kNumRewardTerms; ++i) j[reward_term_names()[i]] = weighted[i];
    j["total"] = total;
    return j;
  }
};

/// Everything the reward needs about one transition.
struct Transition {
  const SimState* state = nullptr;
  const BodyState* body = nullptr;
  VecX qd_prev;
  VecX action;
  VecX action_prev;
  VecX torques;
  const GoalFrame* goal = nullptr;
  std::vector<FootEvent> feet;
  bool terminated = false;
  double dt = 0.02;
};

inline RewardTerms compute_reward_terms(const RobotModel& m, const Transition& t, const RewardConfig& c) {
  const SimState& s = *t.state;
  const BodyState& b = *t.body;
  const GoalFrame& g = *t.goal;
  RewardTerms r;
  auto& v = r.value;

  const VecX jw = joint_weights(m, c);
  const VecX kw = keypoint_weights(m, c);
  v[kJointPos] = weighted_exp_reward((s.q - g.q).array().square().matrix(), jw, c.sigma_joint_pos);
  v[kJointVel] = weighted_exp_reward((s.qd - g.qd).array().square().matrix(), jw, c.sigma_joint_vel);
  VecX pos_err(m.num_keypoints()), rot_err(m.num_keypoints());
  for (int k = 0; k < m.num_keypoints(); ++k) {
    pos_err[k] = (b.keypoints.col(k) - g.keypoints.col(k)).squaredNorm();
    const double d = quat_distance(g.orientations[k], b.orientations[k]);
    rot_err[k] = d * d;
  }
  v[kBodyPos] = weighted_exp_reward(pos_err, kw, c.sigma_body_pos);
  v[kBodyRot] = weighted_exp_reward(rot_err, kw, c.sigma_body_rot);

  v[kActionRate] = (t.action_prev - t.action).squaredNorm();
  v[kEnergy] = t.torques.cwiseProduct(s.q).squaredNorm();
  v[kDofAcc] = ((s.qd - t.qd_prev) / t.dt).squaredNorm();
  double limits = 0.0;
  for (int j = 0; j < m.num_joints(); ++j) limits += (s.q[j] > m.joints[j].upper || s.q[j] < m.joints[j].lower);
  v[kDofLimits] = limits;
  v[kOrientation] = b.gravity.head<2>().squaredNorm();

  for (std::size_t i = 0; i < b.feet.size(); ++i) {
    const auto& f = b.feet[i];
    const double fn = f.force.norm();
    if (fn > c.contact_threshold) v[kFeetSlip] += f.velocity.norm();
    v[kFeetContact] += fn;
    v[kFeetOrientation] += f.gravity.head<2>().squaredNorm();
    if (i < t.feet.size()) {
      const auto& e = t.feet[i];
      if (e.in_air) v[kFeetMaxHeight] += std::max(e.max_height - c.feet_height_target, 0.0);
      if (e.first_step) v[kFeetAirTime] += e.air_time - c.feet_air_time_target;
    }
  }
  v[kTermination] = t.terminated ? 1.0 : 0.0;
  v[kAlive] = 1.0;

  const auto w = reward_weights(c);
  for (int i = 0; i < kNumRewardTerms; ++i) {
    r.weighted[i] = w[i] * v[i];
    r.total += r.weighted[i];
  }
  return r;
}

}  // namespace symmimic
