#pragma once

// Independent oracles shared by the unit tests and the acceptance checks.

#include <array>
#include <string>

#include "symmimic/env/reward.hpp"
#include "symmimic/env/tracking_env.hpp"
#include "symmimic/motion/generate.hpp"
#include "symmimic/train/ppo.hpp"
#include "test_support.hpp"

namespace symmimic::testing {

inline RobotModel free_body(double mass, const Mat3& inertia) {
  RobotModel m;
  m.name = "free-body";
  m.links.push_back({"body", mass, inertia, Vec3::Zero()});
  return m;
}

// Fixed-base planar chain of `n` unit-ish links hanging along -z, hinges about y.
inline RobotModel chain(int n) {
  RobotModel m;
  m.name = "chain";
  m.fixed_base = true;
  m.links.push_back({"root", 1.0, Mat3::Identity() * 0.01, Vec3::Zero()});
  for (int i = 0; i < n; ++i) {
    m.links.push_back({"l" + std::to_string(i), 1.0 + 0.3 * i, Vec3(0.02, 0.015, 0.004).asDiagonal(),
                       Vec3(0, 0, -0.15)});
    JointSpec j;
    j.name = "j" + std::to_string(i);
    j.parent = i;
    j.child = i + 1;
    j.origin = i == 0 ? Vec3::Zero() : Vec3(0, 0, -0.3);
    j.axis = Vec3::UnitY();
    j.lower = -3;
    j.upper = 3;
    m.joints.push_back(j);
  }
  m.symmetry.joint_perm.resize(n);
  for (int i = 0; i < n; ++i) m.symmetry.joint_perm[i] = i;
  m.symmetry.joint_sign.assign(n, 1.0);
  return m;
}

inline GoalFrame goal_from_state(const RobotModel& m, const SimState& s) {
  GoalFrame g;
  g.root = s.base_pose();
  g.root_linear_velocity = s.base_linear_velocity;
  g.root_angular_velocity = s.base_angular_velocity;
  g.q = s.q;
  g.qd = s.qd;
  const auto poses = forward_kinematics(m, g.root, g.q);
  g.keypoints = keypoints_global(m, poses);
  g.orientations = keypoint_orientations(m, poses);
  return g;
}

// Independent scalar evaluation of every reward term.
inline std::array<double, kNumRewardTerms> scalar_terms(const RobotModel& m, const Transition& t, const RewardConfig& c) {
  std::array<double, kNumRewardTerms> v{};
  const SimState& s = *t.state;
  const BodyState& b = *t.body;
  const GoalFrame& g = *t.goal;
  double num_jp = 0, num_jv = 0, den_j = 0;
  for (int j = 0; j < m.num_joints(); ++j) {
    const double w = m.joints[j].weight_class == WeightClass::kLower ? 1.0 : 2.0;
    num_jp += w * std::pow(s.q[j] - g.q[j], 2);
    num_jv += w * std::pow(s.qd[j] - g.qd[j], 2);
    den_j += w;
  }
  v[kJointPos] = std::exp(-num_jp / den_j / (0.5 * 0.5));
  v[kJointVel] = std::exp(-num_jv / den_j / (10.0 * 10.0));
  double num_bp = 0, num_br = 0, den_k = 0;
  for (int k = 0; k < m.num_keypoints(); ++k) {
    const auto wc = m.keypoints[k].weight_class;
    const double w = wc == WeightClass::kEndEffector ? 4.0 : wc == WeightClass::kUpper ? 2.0 : 1.0;
    double d2 = 0;
    for (int a = 0; a < 3; ++a) d2 += std::pow(b.keypoints(a, k) - g.keypoints(a, k), 2);
    num_bp += w * d2;
    const Quat rel = g.orientations[k].conjugate() * b.orientations[k];
    const double vn = std::sqrt(rel.x() * rel.x() + rel.y() * rel.y() + rel.z() * rel.z());
    const double ang = 2.0 * std::asin(std::min(1.0, vn));
    num_br += w * ang * ang;
    den_k += w;
  }
  v[kBodyPos] = std::exp(-num_bp / den_k / (0.3 * 0.3));
  v[kBodyRot] = std::exp(-num_br / den_k / 1.0);
  for (int j = 0; j < m.num_joints(); ++j) {
    v[kActionRate] += std::pow(t.action_prev[j] - t.action[j], 2);
    v[kEnergy] += std::pow(t.torques[j] * s.q[j], 2);
    v[kDofAcc] += std::pow((s.qd[j] - t.qd_prev[j]) / t.dt, 2);
    v[kDofLimits] += (s.q[j] > m.joints[j].upper || s.q[j] < m.joints[j].lower) ? 1.0 : 0.0;
  }
  v[kOrientation] = b.gravity.x() * b.gravity.x() + b.gravity.y() * b.gravity.y();
  for (std::size_t i = 0; i < b.feet.size(); ++i) {
    const auto& f = b.feet[i];
    const double fn = std::sqrt(f.force.x() * f.force.x() + f.force.y() * f.force.y() + f.force.z() * f.force.z());
    if (fn > 1.0) v[kFeetSlip] += f.velocity.norm();
    v[kFeetContact] += fn;
    v[kFeetOrientation] += f.gravity.x() * f.gravity.x() + f.gravity.y() * f.gravity.y();
    if (t.feet[i].in_air && t.feet[i].max_height > 0.1) v[kFeetMaxHeight] += t.feet[i].max_height - 0.1;
    if (t.feet[i].first_step) v[kFeetAirTime] += t.feet[i].air_time - 0.25;
  }
  v[kTermination] = t.terminated;
  v[kAlive] = 1.0;
  return v;
}

struct RandomTransition {
  SimState state;
  BodyState body;
  GoalFrame goal;
  Transition t;
};

inline RandomTransition random_transition(const RobotModel& m, Rng& rng) {
  RandomTransition r;
  r.state = random_state(m, rng);
  r.state.base_position.z() = rng.uniform(0.5, 1.0);
  for (auto& f : r.state.contact_forces) f = rng.bernoulli(0.5) ? random_vec3(rng, 60.0) : Vec3::Zero();
  r.body = body_state(m, r.state);
  SimState gs = random_state(m, rng);
  gs.base_position = r.state.base_position + random_vec3(rng, 0.2);
  r.goal = goal_from_state(m, gs);
  const int n = m.num_joints();
  r.t.state = &r.state;
  r.t.body = &r.body;
  r.t.goal = &r.goal;
  r.t.qd_prev = VecX::Random(n);
  r.t.action = VecX::Random(n);
  r.t.action_prev = VecX::Random(n);
  r.t.torques = VecX::Random(n) * 50.0;
  r.t.feet.resize(m.feet.size());
  for (auto& e : r.t.feet) {
    e.in_air = rng.bernoulli(0.5);
    e.max_height = rng.uniform(0.0, 0.2);
    e.first_step = !e.in_air && rng.bernoulli(0.5);
    e.air_time = rng.uniform(0.0, 0.5);
  }
  r.t.terminated = rng.bernoulli(0.2);
  return r;
}

inline VecX random_vec(int n, Rng& rng, double s = 1.0) {
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-s, s);
  return v;
}

inline MatX random_mat(int r, int c, Rng& rng, double s = 1.0) {
  MatX m(r, c);
  for (int j = 0; j < c; ++j) m.col(j) = random_vec(r, rng, s);
  return m;
}

inline PpoBatch random_batch(const PpoLearner& L, int n, Rng& rng) {
  PpoBatch b;
  const int D = L.actor.obs_dim(), A = L.actor.action_dim();
  b.obs = random_mat(D, n, rng);
  b.critic_obs = b.obs;
  b.old_mean = L.actor.mean(L.actor_norm.normalize(b.obs));
  b.old_log_std = L.actor.log_std();
  b.actions.resize(A, n);
  for (int c = 0; c < n; ++c) b.actions.col(c) = L.actor.sample(b.old_mean.col(c), rng);
  b.old_log_prob = L.actor.log_prob(b.old_mean, b.actions);
  // Perturb the old log-probs so ratios differ from one.
  for (int c = 0; c < n; ++c) b.old_log_prob[c] += rng.uniform(-0.4, 0.4);
  b.advantages = random_vec(n, rng);
  normalize_advantages(b.advantages);
  b.returns = random_vec(n, rng, 3.0);
  return b;
}

// Signed permutation of size n that swaps (0,1), keeps 2 with sign -1, etc.
inline SignedPermutation toy_mirror(int n) {
  SignedPermutation s;
  for (int i = 0; i < n; ++i) {
    const int pair = i ^ 1;
    s.perm.push_back(pair < n ? pair : i);
    s.sign.push_back(pair < n ? 1.0 : -1.0);
  }
  return s;
}

// Single-joint arm swinging 0.8 rad at 0.5 Hz for 4 s, no randomization.
inline EnvSpec arm_spec() {
  const auto m = make_single_joint_arm();
  GenParams p;
  p.kind = "swing";
  p.duration = 4.0;
  p.amplitude = 0.8;
  p.frequency = 0.5;
  return make_env_spec(m, {generate(p, m)}, EnvConfig{}, RewardConfig{}, DomainRandConfig::none());
}

}  // namespace symmimic::testing
