#pragma once

#include <deque>
#include <string>
#include <vector>

#include "symmimic/core/rng.hpp"
#include "symmimic/env/body.hpp"
#include "symmimic/env/config.hpp"
#include "symmimic/env/randomization.hpp"
#include "symmimic/model/symmetry.hpp"
#include "symmimic/motion/goal.hpp"

// Observation layouts (n joints, K keypoints, L links, F feet):
//   proprio   = [q n, qd n, root angvel 3, local keypoints 3K, gravity 3, previous action n]  -> 3n + 3K + 6
//   global    = [keypoint pos 3K, quat 4K, linear vel 3K, angular vel 3K]                      -> 13K
//   goal      = [goal keypoints 3K, goal - robot 3K]  (dofs: [goal q n, goal q - q n])        -> 6K or 2n
//   privileged= [com bias 3, foot friction F, mass scale L, kd n, kp n, torque n, foot forces 3F]
//   teacher   = proprio + global + goal + privileged                                          -> 6n + 22K + L + 4F + 9
//   student   = H * proprio + G * goal_future (3K per frame, heading frame; dofs: n)
// Quaternions are wxyz. The teacher goal is the next control step's frame.

namespace symmimic {

struct ObsLayout {
  int n = 0, K = 0, L = 0, F = 0;
  int history = 10;
  int future = 10;
  bool dof_goal = false;

  int proprio() const { return 3 * n + 3 * K + 6; }
  int global() const { return 13 * K; }
  int goal() const { return dof_goal ? 2 * n : 6 * K; }
  int privileged() const { return 3 + F + L + 3 * n + 3 * F; }
  int teacher() const { return proprio() + global() + goal() + privileged(); }
  int student_goal_frame() const { return dof_goal ? n : 3 * K; }
  int student() const { return history * proprio() + future * student_goal_frame(); }
};

inline ObsLayout make_layout(const RobotModel& m, const EnvConfig& c) {
  ObsLayout l;
  l.n = m.num_joints();
  l.K = m.num_keypoints();
  l.L = m.num_links();
  l.F = static_cast<int>(m.feet.size());
  l.history = c.history_length;
  l.future = c.future_length;
  l.dof_goal = c.goal_representation == "dofs";
  return l;
}

/// out[i] = sign[i] * in[perm[i]]; every mirror used on observations and
/// actions has this form.
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<double> sign;

  int size() const { return static_cast<int>(perm.size()); }
  VecX apply(const Eigen::Ref<const VecX>& v) const {
    if (v.size() != size())
      throw ValidationError("mirror: expected " + std::to_string(size()) + " values, got " + std::to_string(v.size()));
    VecX out(v.size());
    for (int i = 0; i < size(); ++i) out[i] = sign[i] * v[perm[i]];
    return out;
  }
  MatX apply_rows(const MatX& batch) const {  // one sample per column
    MatX out(batch.rows(), batch.cols());
    for (int i = 0; i < size(); ++i) out.row(i) = sign[i] * batch.row(perm[i]);
    return out;
  }
  // Appends a block of `count` items of `width` values each: item k takes
  // item_perm[k], value c of an item gets component_sign[c].
  void append(const std::vector<int>& item_perm, const std::vector<double>& component_sign) {
    const int base = size();
    const int w = static_cast<int>(component_sign.size());
    for (std::size_t k = 0; k < item_perm.size(); ++k)
      for (int c = 0; c < w; ++c) {
        perm.push_back(base + item_perm[k] * w + c);
        sign.push_back(component_sign[c]);
      }
  }
  void append_joint(const SymmetryMap& m, bool signed_values = true) {
    const int base = size();
    for (std::size_t i = 0; i < m.joint_perm.size(); ++i) {
      perm.push_back(base + m.joint_perm[i]);
      sign.push_back(signed_values ? m.joint_sign[i] : 1.0);
    }
  }
};

namespace detail {
inline std::vector<int> identity_perm(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  return p;
}
const std::vector<double> kPolar = {1, -1, 1};
const std::vector<double> kAxial = {-1, 1, -1};
const std::vector<double> kQuat = {1, -1, 1, -1};  // wxyz

inline void append_proprio_mirror(SignedPermutation& s, const RobotModel& m) {
  s.append_joint(m.symmetry);  // q
  s.append_joint(m.symmetry);  // qd
  s.append({0}, kAxial);       // root angular velocity
  s.append(m.symmetry.keypoint_perm, kPolar);
  s.append({0}, kPolar);       // gravity
  s.append_joint(m.symmetry);  // previous action
}
}  // namespace detail

inline SignedPermutation action_mirror(const RobotModel& m) {
  SignedPermutation s;
  s.append_joint(m.symmetry);
  return s;
}

inline SignedPermutation teacher_mirror(const RobotModel& m, const ObsLayout& l) {
  const auto& sym = m.symmetry;
  SignedPermutation s;
  detail::append_proprio_mirror(s, m);
  s.append(sym.keypoint_perm, detail::kPolar);
  s.append(sym.keypoint_perm, detail::kQuat);
  s.append(sym.keypoint_perm, detail::kPolar);
  s.append(sym.keypoint_perm, detail::kAxial);
  if (l.dof_goal) {
    s.append_joint(sym);
    s.append_joint(sym);
  } else {
    s.append(sym.keypoint_perm, detail::kPolar);
    s.append(sym.keypoint_perm, detail::kPolar);
  }
  s.append({0}, detail::kPolar);  // com bias
  s.append(sym.foot_perm, {1.0});
  s.append(sym.link_perm, {1.0});
  s.append_joint(sym, false);  // kd scale
  s.append_joint(sym, false);  // kp scale
  s.append_joint(sym, false);  // torque scale
  s.append(sym.foot_perm, detail::kPolar);
  if (s.size() != l.teacher()) throw ValidationError("teacher mirror does not cover the layout");
  return s;
}

inline SignedPermutation student_mirror(const RobotModel& m, const ObsLayout& l) {
  SignedPermutation s;
  for (int h = 0; h < l.history; ++h) detail::append_proprio_mirror(s, m);
  for (int f = 0; f < l.future; ++f) {
    if (l.dof_goal) s.append_joint(m.symmetry);
    else s.append(m.symmetry.keypoint_perm, detail::kPolar);
  }
  if (s.size() != l.student()) throw ValidationError("student mirror does not cover the layout");
  return s;
}

/// Noise source for actor observations; a null rng or disabled config gives
/// the clean (critic) variant.
struct ObsNoise {
  const DomainRandConfig* config = nullptr;
  Rng* rng = nullptr;
  Vec3 goal_offset = Vec3::Zero();

  bool active() const { return config && rng && config->obs_noise; }
  template <class V>
  void add(V&& v, double std) const {
    if (!active() || std <= 0.0) return;
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] += rng->normal(0.0, std);
  }
};

namespace detail {
struct Writer {
  VecX& out;
  int pos = 0;
  template <class V>
  void put(const V& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out[pos++] = v.data()[i];
  }
  void put(const Quat& q) {
    out[pos++] = q.w();
    out[pos++] = q.x();
    out[pos++] = q.y();
    out[pos++] = q.z();
  }
};

// Goal keypoints as observed: offset and noise are added when noise is on.
inline Points observed_goal(const Points& goal, const ObsNoise& noise) {
  Points g = goal;
  if (noise.config && noise.rng) {
    g.colwise() += noise.goal_offset;
    noise.add(g, noise.config->noise_goal);
  }
  return g;
}
}  // namespace detail

inline VecX build_proprio(const SimState& s, const BodyState& b, const VecX& action_prev, const ObsNoise& noise) {
  const int n = static_cast<int>(s.q.size());
  const int K = static_cast<int>(b.keypoints.cols());
  VecX out(3 * n + 3 * K + 6);
  detail::Writer w{out};
  const DomainRandConfig* c = noise.config;
  VecX q = s.q, qd = s.qd;
  Vec3 av = b.root_angvel_local, g = b.gravity;
  Points pl = b.keypoints_local;
  if (noise.active()) {
    noise.add(q, c->noise_joint_pos);
    noise.add(qd, c->noise_joint_vel);
    noise.add(av, c->noise_root_angvel);
    noise.add(pl, c->noise_local_pos);
    noise.add(g, c->noise_gravity);
  }
  w.put(q);
  w.put(qd);
  w.put(av);
  w.put(pl);
  w.put(g);
  w.put(action_prev);
  return out;
}

inline VecX build_teacher_obs(const ObsLayout& l, const SimState& s, const BodyState& b, const VecX& action_prev,
                              const GoalFrame& goal, const RandomizedParams& params, const ObsNoise& noise) {
  VecX out(l.teacher());
  detail::Writer w{out};
  w.put(build_proprio(s, b, action_prev, noise));
  const DomainRandConfig* c = noise.config;
  Points pos = b.keypoints, lin = b.linear_velocity, ang = b.angular_velocity;
  std::vector<Quat> rot = b.orientations;
  if (noise.active()) {
    noise.add(pos, c->noise_global_pos);
    for (auto& q : rot) noise.add(q.coeffs(), c->noise_global_quat);
    noise.add(lin, c->noise_global_linvel);
    noise.add(ang, c->noise_global_angvel);
  }
  w.put(pos);
  for (const auto& q : rot) w.put(q);
  w.put(lin);
  w.put(ang);
  if (l.dof_goal) {
    VecX gq = goal.q;
    if (noise.active()) noise.add(gq, c->noise_joint_pos);
    w.put(gq);
    w.put(VecX(gq - s.q));
  } else {
    const Points gk = detail::observed_goal(goal.keypoints, noise);
    w.put(gk);
    w.put(Points(gk - pos));
  }
  w.put(params.com_bias);
  for (double f : params.foot_friction) out[w.pos++] = f;
  w.put(params.mass_scale);
  w.put(params.kd_scale);
  w.put(params.kp_scale);
  w.put(params.torque_scale);
  for (const auto& f : b.feet) w.put(f.force);
  if (w.pos != l.teacher()) throw ValidationError("teacher observation layout mismatch");
  return out;
}

/// One goal frame of the student window: keypoints in the robot's heading frame.
inline VecX student_goal_frame(const ObsLayout& l, const BodyState& b, const GoalFrame& goal, const ObsNoise& noise) {
  if (l.dof_goal) {
    VecX gq = goal.q;
    if (noise.active()) noise.add(gq, noise.config->noise_joint_pos);
    return gq;
  }
  const Points gk = keypoints_local(detail::observed_goal(goal.keypoints, noise), b.root);
  return Eigen::Map<const VecX>(gk.data(), gk.size());
}

/// Stacks the proprio history (oldest first) and the goal future window.
inline VecX build_student_obs(const ObsLayout& l, const std::deque<VecX>& history, const std::vector<VecX>& future) {
  if (static_cast<int>(history.size()) != l.history || static_cast<int>(future.size()) != l.future)
    throw ValidationError("student observation: history/future window has the wrong length");
  VecX out(l.student());
  detail::Writer w{out};
  for (const auto& h : history) w.put(h);
  for (const auto& f : future) w.put(f);
  if (w.pos != l.student()) throw ValidationError("student observation layout mismatch");
  return out;
}

}  // namespace symmimic
