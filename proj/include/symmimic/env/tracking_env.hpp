#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symmimic/env/body.hpp"
#include "symmimic/env/config.hpp"
#include "symmimic/env/observation.hpp"
#include "symmimic/env/randomization.hpp"
#include "symmimic/env/reward.hpp"
#include "symmimic/env/termination.hpp"
#include "symmimic/motion/goal.hpp"
#include "symmimic/sim/step.hpp"

namespace symmimic {

/// Shared, immutable inputs of a set of environments.
struct EnvSpec {
  std::shared_ptr<const RobotModel> model;
  std::shared_ptr<const std::vector<GoalTrack>> motions;
  std::vector<std::string> motion_names;
  EnvConfig env;
  RewardConfig reward;
  DomainRandConfig randomization;
  bool build_student = false;  // the teacher layout is always built
};

inline EnvSpec make_env_spec(const RobotModel& model, const std::vector<MotionClip>& clips, EnvConfig env = {},
                             RewardConfig reward = {}, DomainRandConfig rand = {}) {
  if (clips.empty()) throw DataError("environment needs at least one motion");
  validate(env);
  validate(reward);
  validate(rand);
  EnvSpec s;
  s.model = std::make_shared<const RobotModel>(model);
  auto tracks = std::make_shared<std::vector<GoalTrack>>();
  for (const auto& c : clips) {
    tracks->push_back(make_goal_track(resample(c, env.control_hz), model));
    s.motion_names.push_back(c.name);
  }
  s.motions = tracks;
  s.env = env;
  s.reward = reward;
  s.randomization = rand;
  return s;
}

struct EnvStep {
  RewardTerms reward;
  bool terminated = false;
  bool truncated = false;  // episode length limit or end of motion without resampling
  std::string reason;
  bool motion_resampled = false;
  std::optional<Vec3> push;  // sampled push velocity (xy), m/s
  // Critic observation of the final state when the episode ended (the env has
  // already reset); used to bootstrap truncated episodes.
  VecX final_critic_obs;
  bool done() const { return terminated || truncated; }
};

class TrackingEnv {
 public:
  TrackingEnv(EnvSpec spec, std::uint64_t seed)
      : spec_(std::move(spec)), layout_(make_layout(*spec_.model, spec_.env)), rng_(seed),
        noise_rng_(mix_seed(seed, 1)) {}

  const RobotModel& model() const { return *spec_.model; }
  const EnvSpec& spec() const { return spec_; }
  const ObsLayout& layout() const { return layout_; }
  const SimState& state() const { return state_; }
  const BodyState& body() const { return body_; }
  const RandomizedParams& params() const { return params_; }
  const GoalTrack& track() const { return track_; }
  /// Joint torques of the last simulated substep (zero after a kinematic step).
  const VecX& last_torques() const { return last_torques_; }
  int motion_index() const { return motion_; }
  double motion_time() const { return motion_time_; }
  int episode_step() const { return episode_step_; }
  double dt() const { return 1.0 / spec_.env.control_hz; }

  /// When off, a finished episode keeps its final state until reset() is
  /// called (evaluation reads the last frame).
  void set_auto_reset(bool on) { auto_reset_ = on; }

  /// Noisy teacher observation (actor input).
  const VecX& teacher_obs() const { return teacher_obs_; }
  /// Noiseless teacher observation (critic input).
  const VecX& critic_obs() const { return critic_obs_; }
  const VecX& student_obs() const { return student_obs_; }
  const GoalFrame& current_goal() const { return track_.at(goal_index(0)); }

  /// Starts an episode on a random motion (or on `motion` when given).
  void reset(std::optional<int> motion = std::nullopt) {
    const RobotModel& m = model();
    const int count = static_cast<int>(spec_.motions->size());
    motion_ = motion ? *motion : rng_.integer(0, count - 1);
    if (motion_ < 0 || motion_ >= count) throw ValidationError("reset: motion index out of range");
    params_ = sample_randomization(m, spec_.randomization, spec_.env.sim.contact.friction, rng_);
    sim_model_ = randomized_model(m, params_);
    step_params_ = randomized_step_params(m, params_);
    delay_.reset(params_.delay, m.num_joints());
    track_ = (*spec_.motions)[motion_];
    aligned_to_.reset();
    motion_time_ = 0.0;
    if (spec_.env.random_start) {
      const int frames = static_cast<int>(std::floor(track_.duration() / dt() + 1e-9));
      if (frames > 1) motion_time_ = rng_.integer(0, frames - 1) * dt();
    }
    episode_step_ = 0;
    next_push_ = spec_.randomization.push_interval;
    state_ = state_from_goal(track_.at(goal_index(0)));
    action_prev_ = VecX::Zero(m.num_joints());
    last_torques_ = VecX::Zero(m.num_joints());
    feet_.assign(m.feet.size(), FootPhase{});
    body_ = body_state(m, state_);
    history_.clear();
    build_observations(true);
  }

  /// Advances one control step with `action`.
  EnvStep step(const VecX& action) { return advance(&action); }

  /// Playback double: sets the robot kinematically onto the next goal frame
  /// instead of simulating (used as a zero-error oracle policy).
  EnvStep step_kinematic() { return advance(nullptr); }

  /// Teleports the robot (tests and scripted scenarios).
  void set_state(const SimState& s) {
    state_ = s;
    body_ = body_state(model(), state_);
    build_observations(false);
  }

  /// Complete mutable state, for resuming training bit-exactly.
  Json save() const {
    auto mats = [](const auto& seq) {
      Json a = Json::array();
      for (const auto& v : seq) a.push_back(vec_to_json(v));
      return a;
    };
    Json feet = Json::array();
    for (const auto& f : feet_) feet.push_back({f.in_contact, f.air_time, f.max_height});
    Json j = {{"rng", rng_.serialize()},
              {"noise_rng", noise_rng_.serialize()},
              {"params", params_.to_json()},
              {"motion", motion_},
              {"motion_time", motion_time_},
              {"episode_step", episode_step_},
              {"next_push", next_push_},
              {"state", state_to_json(state_)},
              {"action_prev", vec_to_json(action_prev_)},
              {"feet", feet},
              {"delay", mats(delay_.pending())},
              {"history", mats(history_)},
              {"teacher_obs", vec_to_json(teacher_obs_)},
              {"critic_obs", vec_to_json(critic_obs_)},
              {"student_obs", vec_to_json(student_obs_)}};
    if (aligned_to_)
      j["aligned_to"] = {vec3_to_json(aligned_to_->position), quat_to_json(aligned_to_->orientation)};
    return j;
  }

  void load(const Json& j) {
    const RobotModel& m = model();
    rng_.deserialize(j.at("rng").get<std::string>());
    noise_rng_.deserialize(j.at("noise_rng").get<std::string>());
    params_ = RandomizedParams::from_json(j.at("params"));
    sim_model_ = randomized_model(m, params_);
    step_params_ = randomized_step_params(m, params_);
    last_torques_ = VecX::Zero(m.num_joints());
    motion_ = j.at("motion").get<int>();
    if (motion_ < 0 || motion_ >= static_cast<int>(spec_.motions->size()))
      throw DataError("saved environment refers to a missing motion");
    aligned_to_.reset();
    track_ = (*spec_.motions)[motion_];
    if (j.contains("aligned_to")) {
      aligned_to_ = Pose{vec3_from_json(j.at("aligned_to").at(0), "aligned_to"),
                         quat_from_json(j.at("aligned_to").at(1), "aligned_to")};
      track_ = align_goal_track(track_, *aligned_to_);
    }
    motion_time_ = j.at("motion_time").get<double>();
    episode_step_ = j.at("episode_step").get<int>();
    next_push_ = j.at("next_push").get<double>();
    state_ = state_from_json(j.at("state"));
    action_prev_ = vec_from_json(j.at("action_prev"));
    feet_.clear();
    for (const auto& f : j.at("feet")) feet_.push_back({f.at(0).get<bool>(), f.at(1).get<double>(), f.at(2).get<double>()});
    std::deque<VecX> pending;
    for (const auto& v : j.at("delay")) pending.push_back(vec_from_json(v));
    delay_.reset(params_.delay, m.num_joints());
    delay_.set_pending(std::move(pending));
    history_.clear();
    for (const auto& v : j.at("history")) history_.push_back(vec_from_json(v));
    teacher_obs_ = vec_from_json(j.at("teacher_obs"));
    critic_obs_ = vec_from_json(j.at("critic_obs"));
    student_obs_ = vec_from_json(j.at("student_obs"));
    body_ = body_state(m, state_);
  }

 private:
  SimState state_from_goal(const GoalFrame& g) const {
    SimState s = make_state(model());
    s.q = g.q;
    s.qd = g.qd;
    if (!model().fixed_base) {
      s.base_position = g.root.position;
      s.base_orientation = g.root.orientation;
      s.base_linear_velocity = g.root_linear_velocity;
      s.base_angular_velocity = g.root_angular_velocity;
    }
    return s;
  }

  int goal_index(int ahead) const { return track_.index_at(motion_time_ + ahead * dt()); }

  EnvStep advance(const VecX* action) {
    const RobotModel& m = model();
    EnvStep out;
    const VecX qd_prev = state_.qd;
    VecX act = action ? *action : VecX::Zero(m.num_joints());
    if (act.size() != m.num_joints()) throw ValidationError("action length does not match joint count");
    if (!act.allFinite()) throw ValidationError("action is not finite");

    std::optional<Vec3> push;
    if (spec_.randomization.push && !m.fixed_base && episode_step_ * dt() + 1e-9 >= next_push_) {
      const auto& r = spec_.randomization.push_velocity;
      const Vec3 v(rng_.uniform(r.lo, r.hi), rng_.uniform(r.lo, r.hi), 0.0);
      out.push = v;
      // The push sets the horizontal base velocity.
      push = Vec3(v.x() - state_.base_linear_velocity.x(), v.y() - state_.base_linear_velocity.y(), 0.0);
      next_push_ += spec_.randomization.push_interval;
    }

    VecX torques = VecX::Zero(m.num_joints());
    bool unstable = false;
    if (action) {
      try {
        const StepInfo info = step_control(sim_model_, state_, act, spec_.env.sim, step_params_, push, delay_);
        torques = info.torques;
        last_torques_ = info.torques;
      } catch (const InstabilityError&) {
        unstable = true;
      }
    } else {
      last_torques_.setZero();
      const double t = state_.time + dt();
      state_ = state_from_goal(track_.at(goal_index(1)));
      state_.time = t;
    }
    ++episode_step_;
    motion_time_ += dt();

    if (unstable) {
      out.terminated = true;
      out.reason = "instability";
      out.reward.value[kTermination] = 1.0;
      out.reward.weighted[kTermination] = spec_.reward.w_termination;
      out.reward.total = spec_.reward.w_termination;
      out.final_critic_obs = critic_obs_;
      if (auto_reset_) reset();
      return out;
    }

    body_ = body_state(m, state_);
    const GoalFrame& goal = track_.at(goal_index(0));
    Transition tr;
    tr.state = &state_;
    tr.body = &body_;
    tr.qd_prev = qd_prev;
    tr.action = act;
    tr.action_prev = action_prev_;
    tr.torques = torques;
    tr.goal = &goal;
    tr.feet = update_feet(feet_, body_, dt(), spec_.reward.contact_threshold);
    tr.dt = dt();
    if (spec_.env.terminate) {
      const Termination term = check_termination(body_, goal, spec_.env);
      out.terminated = term.terminated;
      out.reason = term.reason;
    }
    tr.terminated = out.terminated;
    out.reward = compute_reward_terms(m, tr, spec_.reward);
    action_prev_ = act;

    if (!out.terminated && motion_time_ >= track_.duration() - 1e-9) {
      if (spec_.env.resample_on_motion_end) {
        motion_ = rng_.integer(0, static_cast<int>(spec_.motions->size()) - 1);
        aligned_to_ = state_.base_pose();
        track_ = align_goal_track((*spec_.motions)[motion_], *aligned_to_);
        motion_time_ = 0.0;
        out.motion_resampled = true;
      } else {
        out.truncated = true;
        out.reason = "motion_end";
      }
    }
    if (!out.done() && episode_step_ >= spec_.env.max_episode_steps) {
      out.truncated = true;
      out.reason = "time_limit";
    }
    build_observations(false);
    if (out.done()) {
      out.final_critic_obs = critic_obs_;
      if (auto_reset_) reset();
    }
    return out;
  }

  void build_observations(bool fresh) {
    const ObsNoise clean;
    ObsNoise noisy{&spec_.randomization, &noise_rng_, params_.goal_offset};
    const GoalFrame& next = track_.at(goal_index(1));
    teacher_obs_ = build_teacher_obs(layout_, state_, body_, action_prev_, next, params_, noisy);
    critic_obs_ = build_teacher_obs(layout_, state_, body_, action_prev_, next, params_, clean);
    if (!spec_.build_student) return;
    VecX proprio = build_proprio(state_, body_, action_prev_, noisy);
    if (fresh || history_.empty()) history_.assign(layout_.history, proprio);
    else {
      history_.push_back(std::move(proprio));
      while (static_cast<int>(history_.size()) > layout_.history) history_.pop_front();
    }
    std::vector<VecX> future;
    for (int k = 1; k <= layout_.future; ++k)
      future.push_back(student_goal_frame(layout_, body_, track_.at(goal_index(k)), noisy));
    student_obs_ = build_student_obs(layout_, history_, future);
  }

  EnvSpec spec_;
  bool auto_reset_ = true;
  ObsLayout layout_;
  Rng rng_;
  Rng noise_rng_;
  RandomizedParams params_;
  RobotModel sim_model_;
  StepParams step_params_;
  DelayBuffer delay_;
  GoalTrack track_;
  std::optional<Pose> aligned_to_;
  int motion_ = 0;
  double motion_time_ = 0.0;
  VecX last_torques_;
  int episode_step_ = 0;
  double next_push_ = 0.0;
  SimState state_;
  BodyState body_;
  VecX action_prev_;
  std::vector<FootPhase> feet_;
  std::deque<VecX> history_;
  VecX teacher_obs_, critic_obs_, student_obs_;
};

}  // namespace symmimic
