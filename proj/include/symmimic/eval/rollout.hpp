#pragma once

#include <functional>
#include <limits>

#include "symmimic/env/tracking_env.hpp"
#include "symmimic/eval/metrics.hpp"
#include "symmimic/net/checkpoint.hpp"

namespace symmimic {

/// Advances the environment by one control step.
using StepFn = std::function<EnvStep(TrackingEnv&)>;

/// Test double that places the robot on the next goal frame.
inline StepFn playback_policy() {
  return [](TrackingEnv& env) { return env.step_kinematic(); };
}

/// Deterministic (mean) action of a trained policy. The checkpoint must
/// outlive the returned function.
inline StepFn checkpoint_policy(const PolicyCheckpoint& c) {
  const bool student = c.observation == "student";
  return [&c, student](TrackingEnv& env) { return env.step(c.act(student ? env.student_obs() : env.teacher_obs())); };
}

/// Runs one motion from its first frame to its end, or to termination when
/// `terminate` is set. Without termination the rollout continues after a fall;
/// only a simulator instability ends it early.
inline TrajectoryRecord rollout(const EnvSpec& base, int motion, const StepFn& policy, bool terminate,
                                std::uint64_t seed) {
  EnvSpec spec = base;
  spec.env.terminate = terminate;
  spec.env.resample_on_motion_end = false;
  spec.env.random_start = false;
  spec.env.max_episode_steps = std::numeric_limits<int>::max();
  TrackingEnv env(spec, seed);
  env.set_auto_reset(false);
  env.reset(motion);

  TrajectoryRecord rec;
  rec.motion = spec.motion_names.at(motion);
  rec.terminate_enabled = terminate;
  auto record = [&] {
    const GoalFrame& g = env.current_goal();
    rec.robot.push_back(env.body().keypoints);
    rec.goal.push_back(g.keypoints);
    rec.robot_root.push_back(env.state().base_pose());
    rec.goal_root.push_back(g.root);
  };
  record();
  const int steps = env.track().num_frames() - 1;
  for (int k = 1; k <= steps; ++k) {
    const EnvStep r = policy(env);
    if (r.terminated) {
      rec.terminated = true;
      rec.termination_step = k;
      rec.reason = r.reason;
      break;
    }
    record();
    if (r.done()) break;
  }
  return rec;
}

/// Environment for evaluating a checkpoint with its own model and env config.
inline EnvSpec env_spec_for_checkpoint(const PolicyCheckpoint& c, const std::vector<MotionClip>& clips,
                                       const DomainRandConfig& rand, const RewardConfig& reward = {}) {
  const RobotModel m = model_from_json(c.model);
  EnvSpec s = make_env_spec(m, clips, env_config_from_json(c.env_config), reward, rand);
  s.build_student = c.observation == "student";
  const ObsLayout l = make_layout(m, s.env);
  const int want = s.build_student ? l.student() : l.teacher();
  if (want != c.actor.obs_dim())
    throw DataError("checkpoint expects " + std::to_string(c.actor.obs_dim()) + " observations, environment gives " +
                    std::to_string(want));
  return s;
}

/// As above with either the default randomization or none.
inline EnvSpec env_spec_for_checkpoint(const PolicyCheckpoint& c, const std::vector<MotionClip>& clips,
                                       bool randomize) {
  return env_spec_for_checkpoint(c, clips, randomize ? DomainRandConfig{} : DomainRandConfig::none());
}

}  // namespace symmimic
