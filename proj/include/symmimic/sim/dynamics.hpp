#pragma once

#include <vector>

#include "symmimic/core/math.hpp"
#include "symmimic/model/kinematics.hpp"
#include "symmimic/model/robot_model.hpp"
#include "symmimic/sim/state.hpp"

// Spatial algebra with every quantity expressed in world coordinates at the
// world origin, angular part first: motion [w; v_O], force [n_O; f].

namespace symmimic {

namespace spatial {

inline Vec6 motion(const Vec3& ang, const Vec3& lin) {
  Vec6 v;
  v << ang, lin;
  return v;
}

inline Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  const Vec3 w = v.head<3>(), vo = v.tail<3>();
  const Vec3 ma = m.head<3>(), ml = m.tail<3>();
  return motion(w.cross(ma), w.cross(ml) + vo.cross(ma));
}

inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  const Vec3 w = v.head<3>(), vo = v.tail<3>();
  const Vec3 fa = f.head<3>(), fl = f.tail<3>();
  return motion(w.cross(fa) + vo.cross(fl), w.cross(fl));
}

/// Spatial inertia at the world origin of a body with mass m, world COM c and
/// world-frame rotational inertia about the COM.
inline Mat6 inertia(double m, const Vec3& c, const Mat3& inertia_com) {
  const Mat3 cx = skew(c);
  Mat6 I;
  I.block<3, 3>(0, 0) = inertia_com + m * cx * cx.transpose();
  I.block<3, 3>(0, 3) = m * cx;
  I.block<3, 3>(3, 0) = m * cx.transpose();
  I.block<3, 3>(3, 3) = m * Mat3::Identity();
  return I;
}

/// Maps base coordinates [v_base; omega] to the base spatial velocity.
inline Mat6 base_subspace(const Vec3& base_position) {
  Mat6 S = Mat6::Zero();
  S.block<3, 3>(0, 3) = Mat3::Identity();
  S.block<3, 3>(3, 0) = Mat3::Identity();
  S.block<3, 3>(3, 3) = skew(base_position);
  return S;
}

}  // namespace spatial

/// Per-state quantities shared by the dynamics routines.
struct DynamicsFrame {
  LinkPoses poses;
  std::vector<Mat6> inertia;   // per link
  std::vector<Vec6> subspace;  // per joint
  std::vector<int> parent_joint;  // joint whose child is the joint's parent link, -1 at root
  Mat6 base_S;
  std::vector<Vec3> com;       // world COM per link
};

inline DynamicsFrame dynamics_frame(const RobotModel& model, const SimState& s) {
  DynamicsFrame f;
  f.poses = forward_kinematics(model, s.base_pose(), s.q);
  const int nl = model.num_links();
  f.inertia.resize(nl);
  f.com.resize(nl);
  for (int l = 0; l < nl; ++l) {
    const auto& link = model.links[l];
    const Mat3 R = f.poses[l].orientation.toRotationMatrix();
    f.com[l] = f.poses[l].apply(link.com);
    f.inertia[l] = spatial::inertia(link.mass, f.com[l], R * link.inertia * R.transpose());
  }
  f.subspace.resize(model.num_joints());
  f.parent_joint.resize(model.num_joints());
  for (int j = 0; j < model.num_joints(); ++j) {
    const auto& jt = model.joints[j];
    const Vec3 a = f.poses[jt.parent].orientation * jt.axis;
    const Vec3 o = f.poses[jt.child].position;
    f.subspace[j] = spatial::motion(a, o.cross(a));
    f.parent_joint[j] = model.joint_of_link(jt.parent);
  }
  f.base_S = spatial::base_subspace(s.base_position);
  return f;
}

/// Joint-space inertia matrix via the composite-rigid-body algorithm.
inline MatX mass_matrix(const RobotModel& model, const DynamicsFrame& f) {
  const int n = model.num_dofs();
  const int bd = model.base_dofs();
  MatX M = MatX::Zero(n, n);
  std::vector<Mat6> Ic = f.inertia;
  for (int j = model.num_joints() - 1; j >= 0; --j) Ic[model.joints[j].parent] += Ic[model.joints[j].child];

  for (int j = 0; j < model.num_joints(); ++j) {
    const Vec6 F = Ic[model.joints[j].child] * f.subspace[j];
    const int cj = bd + j;
    M(cj, cj) = f.subspace[j].dot(F) + model.joints[j].armature;
    for (int k = f.parent_joint[j]; k >= 0; k = f.parent_joint[k]) {
      M(bd + k, cj) = f.subspace[k].dot(F);
      M(cj, bd + k) = M(bd + k, cj);
    }
    if (bd) {
      const Vec6 col = f.base_S.transpose() * F;
      M.block(0, cj, 6, 1) = col;
      M.block(cj, 0, 1, 6) = col.transpose();
    }
  }
  if (bd) M.block<6, 6>(0, 0) = f.base_S.transpose() * Ic[0] * f.base_S;
  return M;
}

inline MatX mass_matrix(const RobotModel& model, const SimState& s) { return mass_matrix(model, dynamics_frame(model, s)); }

/// Spatial velocity of every link.
inline std::vector<Vec6> link_velocities(const RobotModel& model, const DynamicsFrame& f, const SimState& s) {
  std::vector<Vec6> v(model.num_links(), Vec6::Zero());
  if (!model.fixed_base) {
    Vec6 ub;
    ub << s.base_linear_velocity, s.base_angular_velocity;
    v[0] = f.base_S * ub;
  }
  for (int j = 0; j < model.num_joints(); ++j)
    v[model.joints[j].child] = v[model.joints[j].parent] + f.subspace[j] * s.qd[j];
  return v;
}

/// Coriolis, centrifugal and gravity generalized force (recursive Newton-Euler
/// with zero generalized acceleration).
inline VecX bias_forces(const RobotModel& model, const DynamicsFrame& f, const SimState& s, double gravity) {
  const int nl = model.num_links();
  std::vector<Vec6> v = link_velocities(model, f, s);
  std::vector<Vec6> a(nl, Vec6::Zero());
  const Vec6 a_grav = spatial::motion(Vec3::Zero(), Vec3(0.0, 0.0, gravity));
  a[0] = a_grav;
  if (!model.fixed_base) a[0] += spatial::motion(Vec3::Zero(), s.base_linear_velocity.cross(s.base_angular_velocity));
  for (int j = 0; j < model.num_joints(); ++j) {
    const auto& jt = model.joints[j];
    a[jt.child] = a[jt.parent] + spatial::cross_motion(v[jt.child], f.subspace[j]) * s.qd[j];
  }
  std::vector<Vec6> F(nl);
  for (int l = 0; l < nl; ++l) F[l] = f.inertia[l] * a[l] + spatial::cross_force(v[l], f.inertia[l] * v[l]);

  VecX tau = VecX::Zero(model.num_dofs());
  const int bd = model.base_dofs();
  for (int j = model.num_joints() - 1; j >= 0; --j) {
    const auto& jt = model.joints[j];
    tau[bd + j] = f.subspace[j].dot(F[jt.child]);
    F[jt.parent] += F[jt.child];
  }
  if (bd) tau.head<6>() = f.base_S.transpose() * F[0];
  return tau;
}

inline VecX bias_forces(const RobotModel& model, const SimState& s, double gravity) {
  return bias_forces(model, dynamics_frame(model, s), s, gravity);
}

/// Symmetric bilinear velocity-product term B(a, b) of the bias force, with
/// B(u, u) the Coriolis/centrifugal part. Evaluated by polarization.
inline VecX velocity_product(const RobotModel& model, const DynamicsFrame& f, const SimState& s,
                             const Eigen::Ref<const VecX>& a, const Eigen::Ref<const VecX>& b) {
  SimState p = s, m = s;
  set_generalized_velocity(model, p, a + b);
  set_generalized_velocity(model, m, a - b);
  return 0.25 * (bias_forces(model, f, p, 0.0) - bias_forces(model, f, m, 0.0));
}

/// Generalized gravity force (bias at zero velocity).
inline VecX gravity_forces(const RobotModel& model, const DynamicsFrame& f, const SimState& s, double gravity) {
  SimState z = s;
  set_generalized_velocity(model, z, VecX::Zero(model.num_dofs()));
  return bias_forces(model, f, z, gravity);
}

/// Spatial Jacobian (6 x dofs) of `link`.
inline MatX link_jacobian(const RobotModel& model, const DynamicsFrame& f, int link) {
  MatX J = MatX::Zero(6, model.num_dofs());
  const int bd = model.base_dofs();
  if (bd) J.leftCols<6>() = f.base_S;
  for (int j = model.joint_of_link(link); j >= 0; j = f.parent_joint[j]) J.col(bd + j) = f.subspace[j];
  return J;
}

/// Jacobian (3 x dofs) of the velocity of world point x rigidly attached to `link`.
inline MatX point_jacobian(const RobotModel& model, const DynamicsFrame& f, int link, const Vec3& x) {
  const MatX J6 = link_jacobian(model, f, link);
  MatX J(3, J6.cols());
  for (Eigen::Index c = 0; c < J6.cols(); ++c) {
    const Vec3 w = J6.block<3, 1>(0, c), vo = J6.block<3, 1>(3, c);
    J.col(c) = vo + w.cross(x);
  }
  return J;
}

inline Vec3 point_velocity(const Vec6& link_velocity, const Vec3& x) {
  return link_velocity.tail<3>() + link_velocity.head<3>().cross(x);
}

inline double kinetic_energy(const RobotModel& model, const SimState& s) {
  const VecX u = generalized_velocity(model, s);
  return 0.5 * u.dot(mass_matrix(model, s) * u);
}

inline double potential_energy(const RobotModel& model, const SimState& s, double gravity) {
  const DynamicsFrame f = dynamics_frame(model, s);
  double v = 0.0;
  for (int l = 0; l < model.num_links(); ++l) v += model.links[l].mass * gravity * f.com[l].z();
  return v;
}

/// Whole-body linear momentum, sum of m_i * v_com_i.
inline Vec3 linear_momentum(const RobotModel& model, const DynamicsFrame& f, const SimState& s) {
  const auto v = link_velocities(model, f, s);
  Vec3 p = Vec3::Zero();
  for (int l = 0; l < model.num_links(); ++l) p += model.links[l].mass * point_velocity(v[l], f.com[l]);
  return p;
}

inline Vec3 linear_momentum(const RobotModel& model, const SimState& s) {
  return linear_momentum(model, dynamics_frame(model, s), s);
}

}  // namespace symmimic
