#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/math.hpp"
#include "symmimic/model/robot_model.hpp"
#include "symmimic/sim/actuation.hpp"
#include "symmimic/sim/contact.hpp"
#include "symmimic/sim/dynamics.hpp"
#include "symmimic/sim/state.hpp"

namespace symmimic {

/// Per-instance actuation and contact parameters (domain randomization lands here).
struct StepParams {
  PDGains gains;
  VecX torque_scale;                 // empty = 1
  std::vector<double> foot_friction; // empty = config friction
};

inline StepParams default_step_params(const RobotModel& model) { return {default_gains(model), {}, {}}; }

struct StepInfo {
  VecX applied_action;
  VecX q_des;
  VecX torques;  // last substep, N m
  std::vector<GroundContactResult> contacts;  // last substep
  Vec3 push = Vec3::Zero();
};

namespace detail {

enum class ContactMode { Off, Stick, Slip };

struct ActiveContact {
  int sphere;
  MatX J;  // 3 x dofs
  double penetration;
  double mu;
  ContactMode mode;
  Vec3 slip_dir = Vec3::Zero();
};

// Contact force as an affine function of the end-of-substep point velocity:
// f = f0 + D v'. The normal spring uses the predicted penetration delta - dt vz'.
inline void contact_affine(const ContactConfig& c, double dt, const ActiveContact& a, Vec3& f0, Mat3& D) {
  f0.setZero();
  D.setZero();
  if (a.mode == ContactMode::Off) return;
  const double kn = c.damping + c.stiffness * dt;
  f0.z() = c.stiffness * a.penetration;
  D(2, 2) = -kn;
  if (a.mode == ContactMode::Stick) {
    D(0, 0) = -c.tangential_damping;
    D(1, 1) = -c.tangential_damping;
  } else {
    f0.x() = -a.mu * a.slip_dir.x() * f0.z();
    f0.y() = -a.mu * a.slip_dir.y() * f0.z();
    D(0, 2) = a.mu * a.slip_dir.x() * kn;
    D(1, 2) = a.mu * a.slip_dir.y() * kn;
  }
}

inline Vec3 tangential(const Vec3& v) { return {v.x(), v.y(), 0.0}; }

// Runs the stick/slip/separation active-set passes for a given right-hand
// side, starting from the modes already in `act`. Returns the new velocity
// and the per-contact affine forces at that velocity.
inline VecX solve_with_contacts(const MatX& M, const VecX& rhs0, const ContactConfig& config, double dt,
                                std::vector<ActiveContact>& act, std::vector<Vec3>& forces) {
  VecX u_new;
  forces.assign(act.size(), Vec3::Zero());
  constexpr int kMaxPasses = 6;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    MatX A = M;
    VecX rhs = rhs0;
    for (const auto& a : act) {
      if (a.mode == ContactMode::Off) continue;
      Vec3 f0;
      Mat3 D;
      contact_affine(config, dt, a, f0, D);
      A.noalias() -= dt * a.J.transpose() * D * a.J;
      rhs.noalias() += dt * a.J.transpose() * f0;
    }
    u_new = A.partialPivLu().solve(rhs);

    bool changed = false;
    for (std::size_t k = 0; k < act.size(); ++k) {
      auto& a = act[k];
      if (a.mode == ContactMode::Off) continue;
      const Vec3 v = a.J * u_new;
      Vec3 f0;
      Mat3 D;
      contact_affine(config, dt, a, f0, D);
      forces[k] = f0 + D * v;
      if (forces[k].z() < 0.0) {
        a.mode = ContactMode::Off;
        forces[k].setZero();
        changed = true;
        continue;
      }
      const Vec3 ft = tangential(forces[k]);
      if (a.mode == ContactMode::Stick && ft.norm() > a.mu * forces[k].z()) {
        a.mode = ContactMode::Slip;
        a.slip_dir = -ft / ft.norm();
        changed = true;
      } else if (a.mode == ContactMode::Slip && tangential(v).dot(a.slip_dir) < 0.0) {
        a.mode = ContactMode::Stick;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return u_new;
}

}  // namespace detail

/// One physics substep. Joint torques are explicit. Contact forces and the
/// Coriolis term are linearly implicit in the new velocity: a predictor solve
/// with the explicit bias is followed by one corrector with B(u, u') in place
/// of B(u, u). The corrector removes the energy gain of the purely explicit
/// velocity update on swinging chains.
inline std::vector<GroundContactResult> physics_substep(const RobotModel& model, SimState& s, const SimConfig& config,
                                                        const VecX& tau, const std::vector<double>& mu) {
  const double dt = config.physics_dt;
  const int bd = model.base_dofs();
  const DynamicsFrame f = dynamics_frame(model, s);
  const MatX M = mass_matrix(model, f);
  const VecX u = generalized_velocity(model, s);
  const VecX grav = gravity_forces(model, f, s, config.gravity);

  VecX h = -grav;
  h.tail(model.num_joints()) += tau;
  const VecX Mu = M * u;

  const auto spheres = sphere_kinematics(model, f, s);
  std::vector<detail::ActiveContact> act;
  for (std::size_t i = 0; i < spheres.size(); ++i) {
    if (spheres[i].penetration <= 0.0) continue;
    act.push_back({static_cast<int>(i), point_jacobian(model, f, spheres[i].link, spheres[i].point),
                   spheres[i].penetration, mu[i], detail::ContactMode::Stick});
  }

  std::vector<Vec3> forces;
  const VecX u_pred =
      detail::solve_with_contacts(M, Mu + dt * (h - velocity_product(model, f, s, u, u)), config.contact, dt, act, forces);
  const VecX u_new = detail::solve_with_contacts(M, Mu + dt * (h - velocity_product(model, f, s, u, u_pred)),
                                                 config.contact, dt, act, forces);

  // Reported forces obey the cone exactly; they are also what the momentum
  // balance below uses.
  std::vector<GroundContactResult> out(spheres.size());
  for (std::size_t i = 0; i < spheres.size(); ++i) out[i].slip_speed = detail::tangential(spheres[i].velocity).norm();
  Vec3 total_contact = Vec3::Zero();
  for (std::size_t k = 0; k < act.size(); ++k) {
    auto& r = out[act[k].sphere];
    const Vec3 v = act[k].J * u_new;
    r.slip_speed = detail::tangential(v).norm();
    if (act[k].mode == detail::ContactMode::Off) continue;
    Vec3 fk = forces[k];
    fk.z() = std::max(0.0, fk.z());
    const Vec3 ft = detail::tangential(fk);
    const double cap = act[k].mu * fk.z();
    if (ft.norm() > cap) {
      const double scale = cap / ft.norm();
      fk.x() *= scale;
      fk.y() *= scale;
    }
    r.force = fk;
    r.in_contact = true;
    total_contact += fk;
  }

  Vec3 momentum_target = Vec3::Zero();
  double total_mass = 0.0;
  if (bd && config.momentum_projection) {
    total_mass = model.total_mass();
    momentum_target = linear_momentum(model, f, s) + dt * (total_contact - total_mass * config.gravity * Vec3::UnitZ());
  }

  set_generalized_velocity(model, s, u_new);
  if (bd) {
    s.base_position += dt * s.base_linear_velocity;
    s.base_orientation = (quat_exp(dt * s.base_angular_velocity) * s.base_orientation).normalized();
  }
  s.q += dt * s.qd;
  s.time += dt;

  if (bd && config.momentum_projection) {
    const Vec3 p_new = linear_momentum(model, s);
    s.base_linear_velocity += (momentum_target - p_new) / total_mass;
  }
  s.contact_forces.resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) s.contact_forces[i] = out[i].force;
  return out;
}

/// Advances one control step: delays the action, maps it to PD targets,
/// applies the optional push to the base linear velocity, then runs the
/// physics substeps. Throws InstabilityError if the state stops being finite.
inline StepInfo step_control(const RobotModel& model, SimState& state, const VecX& action, const SimConfig& config,
                             const StepParams& params, const std::optional<Vec3>& push, DelayBuffer& delay) {
  if (action.size() != model.num_joints()) throw ValidationError("action length does not match joint count");
  StepInfo info;
  info.applied_action = delay.push(action);
  info.q_des = action_to_target(config, model.default_pose(), info.applied_action);
  if (push) {
    if (model.fixed_base) throw ValidationError("push requires a floating base");
    state.base_linear_velocity += *push;
    info.push = *push;
  }
  const VecX limits = torque_limits(model);
  const std::vector<double> mu = sphere_friction(model, config.contact, params.foot_friction);
  const VecX* scale = params.torque_scale.size() ? &params.torque_scale : nullptr;
  for (int k = 0; k < config.substeps_per_control; ++k) {
    info.torques = pd_torques(params.gains, info.q_des, state.q, state.qd, limits, scale);
    info.contacts = physics_substep(model, state, config, info.torques, mu);
    if (!state_is_finite(state)) throw InstabilityError("non-finite state at t=" + std::to_string(state.time));
  }
  return info;
}

/// One JSON-lines record of the trajectory dump.
inline Json trajectory_record(const SimState& s, const StepInfo& info) {
  Json forces = Json::array();
  for (const auto& c : info.contacts) forces.push_back(vec3_to_json(c.force));
  return {{"time", s.time},
          {"base_position", vec3_to_json(s.base_position)},
          {"base_orientation", quat_to_json(s.base_orientation)},
          {"q", vec_to_json(s.q)},
          {"qd", vec_to_json(s.qd)},
          {"torques", vec_to_json(info.torques)},
          {"contact_forces", forces}};
}

inline void write_trajectory_record(std::ostream& os, const SimState& s, const StepInfo& info) {
  os << trajectory_record(s, info).dump() << '\n';
}

}  // namespace symmimic
