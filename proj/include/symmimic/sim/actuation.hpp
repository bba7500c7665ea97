#pragma once

#include <deque>

#include "symmimic/core/error.hpp"
#include "symmimic/core/math.hpp"
#include "symmimic/sim/state.hpp"

namespace symmimic {

/// tau = kp (q_des - q) - kd qd, scaled per joint, clamped to +-limit.
inline VecX pd_torques(const PDGains& gains, const Eigen::Ref<const VecX>& q_des, const Eigen::Ref<const VecX>& q,
                       const Eigen::Ref<const VecX>& qd, const Eigen::Ref<const VecX>& torque_limit,
                       const VecX* torque_scale = nullptr) {
  VecX tau = gains.kp.cwiseProduct(q_des - q) - gains.kd.cwiseProduct(qd);
  if (torque_scale) tau = tau.cwiseProduct(*torque_scale);
  for (Eigen::Index i = 0; i < tau.size(); ++i) tau[i] = clamp(tau[i], -torque_limit[i], torque_limit[i]);
  return tau;
}

inline VecX torque_limits(const RobotModel& model) {
  VecX v(model.num_joints());
  for (int j = 0; j < model.num_joints(); ++j) v[j] = model.joints[j].torque_limit;
  return v;
}

/// q_des = q_default + c * clip(a, -a_clip, a_clip).
inline VecX action_to_target(const SimConfig& config, const Eigen::Ref<const VecX>& default_pose,
                             const Eigen::Ref<const VecX>& action) {
  if (action.size() != default_pose.size()) throw ValidationError("action length does not match joint count");
  return default_pose + config.action_scale * action.cwiseMax(-config.action_clip).cwiseMin(config.action_clip);
}

/// Holds the last D actions; the applied action lags the commanded one by D
/// control steps. Starts filled with zero actions.
class DelayBuffer {
 public:
  DelayBuffer() = default;
  DelayBuffer(int delay, int action_dim) { reset(delay, action_dim); }

  void reset(int delay, int action_dim) {
    if (delay < 0) throw ConfigError("control delay must be >= 0");
    delay_ = delay;
    queue_.assign(static_cast<std::size_t>(delay), VecX::Zero(action_dim));
  }
  /// Pushes the commanded action and returns the one to apply now.
  VecX push(const VecX& action) {
    if (delay_ == 0) return action;
    queue_.push_back(action);
    VecX out = queue_.front();
    queue_.pop_front();
    return out;
  }
  int delay() const { return delay_; }
  const std::deque<VecX>& pending() const { return queue_; }
  void set_pending(std::deque<VecX> q) { queue_ = std::move(q); }

 private:
  int delay_ = 0;
  std::deque<VecX> queue_;
};

}  // namespace symmimic
