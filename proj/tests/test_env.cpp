#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "symmimic/env/tracking_env.hpp"
#include "symmimic/motion/generate.hpp"

using namespace symmimic;
using namespace symmimic::testing;

namespace {

MotionClip stand_clip(const RobotModel& m, double duration = 2.0) {
  GenParams p;
  p.kind = "stand";
  p.duration = duration;
  return generate(p, m);
}

// No randomization and every episode starting at the first frame.
EnvSpec quiet_spec(const RobotModel& m, std::vector<MotionClip> clips) {
  EnvConfig c;
  c.random_start = false;
  return make_env_spec(m, clips, c, RewardConfig{}, DomainRandConfig::none());
}

}  // namespace

TEST(WeightedReward, ClosedForms) {
  EXPECT_EQ(weighted_exp_reward(VecX::Zero(4), VecX::Ones(4), 0.3), 1.0);
  VecX e(1), w(1);
  e << 0.25;
  w << 1.0;
  EXPECT_NEAR(weighted_exp_reward(e, w, 0.5), std::exp(-1.0), 1e-15);
  EXPECT_THROW(weighted_exp_reward(e, w, 0.0), ConfigError);
}

TEST(WeightedReward, MiniHumanoidClassWeights) {
  const auto m = make_mini_humanoid();
  const VecX w = keypoint_weights(m, RewardConfig{});
  // 3 end effectors (head, hands) at 4, 4 upper at 2, 4 lower at 1.
  EXPECT_EQ(w.sum(), 3 * 4.0 + 4 * 2.0 + 4 * 1.0);
  EXPECT_EQ(w[m.find_keypoint("head")], 4.0);
  EXPECT_EQ(w[m.find_keypoint("left_hand")], 4.0);
  EXPECT_EQ(w[m.find_keypoint("torso")], 2.0);
  EXPECT_EQ(w[m.find_keypoint("right_foot")], 1.0);
  Rng rng(3);
  VecX e(m.num_keypoints());
  for (int k = 0; k < e.size(); ++k) e[k] = rng.uniform(0.0, 0.05);
  double acc = 0.0;
  for (int k = 0; k < e.size(); ++k) acc += (w[k] / 24.0) * e[k];
  EXPECT_NEAR(weighted_exp_reward(e, w, 0.3), std::exp(-acc / 0.09), 1e-14);
  RewardConfig flat;
  flat.class_weights = false;
  EXPECT_EQ(keypoint_weights(m, flat), VecX::Ones(m.num_keypoints()));
}

TEST(Reward, OnGoalTotalIs138) {
  const auto m = make_mini_humanoid();
  const auto clip = stand_clip(m);
  const auto track = make_goal_track(clip, m);
  SimState s = make_state(m);
  s.base_position = track.frames[0].root.position + Vec3(0, 0, 0.1);  // no contact
  s.q = track.frames[0].q;
  GoalFrame g = goal_from_state(m, s);
  const BodyState b = body_state(m, s);
  Transition t;
  t.state = &s;
  t.body = &b;
  t.goal = &g;
  t.qd_prev = VecX::Zero(m.num_joints());
  t.action = VecX::Zero(m.num_joints());
  t.action_prev = t.action;
  t.torques = VecX::Zero(m.num_joints());
  t.feet.resize(2);
  const auto r = compute_reward_terms(m, t, RewardConfig{});
  for (auto term : {kJointPos, kJointVel, kBodyPos, kBodyRot}) EXPECT_EQ(r[term], 1.0);
  for (int i = kActionRate; i <= kTermination; ++i) EXPECT_NEAR(r.weighted[i], 0.0, 1e-12) << reward_term_names()[i];
  EXPECT_NEAR(r.total, 138.0, 1e-12);
}

TEST(Reward, JointPastLimitCostsOneHundred) {
  const auto m = make_mini_humanoid();
  SimState s = make_state(m);
  s.base_position.z() = 2.0;
  const int j = m.find_joint("right_elbow");
  s.q[j] = m.joints[j].upper + 0.01;
  const BodyState b = body_state(m, s);
  const GoalFrame g = goal_from_state(m, s);
  Transition t;
  t.state = &s;
  t.body = &b;
  t.goal = &g;
  t.qd_prev = t.action = t.action_prev = t.torques = VecX::Zero(m.num_joints());
  const auto r = compute_reward_terms(m, t, RewardConfig{});
  EXPECT_EQ(r[kDofLimits], 1.0);
  EXPECT_EQ(r.weighted[kDofLimits], -100.0);
}

TEST(Reward, FeetSlipHandExample) {
  const auto m = make_mini_humanoid();
  SimState s = make_state(m);
  BodyState b = body_state(m, s);
  for (auto& f : b.feet) {
    f.force.setZero();
    f.velocity.setZero();
  }
  b.feet[0].force = Vec3(0, 0, 50);
  b.feet[0].velocity = Vec3(0.2, 0, 0);
  b.feet[1].velocity = Vec3(0.7, 0, 0);  // airborne foot does not count
  const GoalFrame g = goal_from_state(m, s);
  Transition t;
  t.state = &s;
  t.body = &b;
  t.goal = &g;
  t.qd_prev = t.action = t.action_prev = t.torques = VecX::Zero(m.num_joints());
  const auto r = compute_reward_terms(m, t, RewardConfig{});
  EXPECT_NEAR(r[kFeetSlip], 0.2, 1e-15);
  EXPECT_NEAR(r.weighted[kFeetSlip], -1.0, 1e-14);
}

TEST(Reward, MatchesScalarRecomputation) {
  const auto m = make_mini_humanoid();
  Rng rng(17);
  const auto w = reward_weights(RewardConfig{});
  for (int i = 0; i < 100; ++i) {
    auto r = random_transition(m, rng);
    const auto terms = compute_reward_terms(m, r.t, RewardConfig{});
    const auto oracle = scalar_terms(m, r.t, RewardConfig{});
    double total = 0;
    for (int k = 0; k < kNumRewardTerms; ++k) {
      EXPECT_NEAR(terms.value[k], oracle[k], 1e-9 * std::max(1.0, std::abs(oracle[k]))) << reward_term_names()[k];
      total += w[k] * oracle[k];
    }
    EXPECT_NEAR(terms.total, total, 1e-9 * std::max(1.0, std::abs(total)));
  }
}

TEST(Reward, MirrorInvariant) {
  const auto m = make_mini_humanoid();
  Rng rng(23);
  for (int i = 0; i < 1000; ++i) {
    auto r = random_transition(m, rng);
    const auto base = compute_reward_terms(m, r.t, RewardConfig{});
    SimState ms = mirror_state(m, r.state);
    BodyState mb = body_state(m, ms);
    GoalFrame mg = mirror_goal_frame(m, r.goal);
    Transition mt = r.t;
    mt.state = &ms;
    mt.body = &mb;
    mt.goal = &mg;
    mt.qd_prev = mirror_joint_vector(m.symmetry, r.t.qd_prev);
    mt.action = mirror_joint_vector(m.symmetry, r.t.action);
    mt.action_prev = mirror_joint_vector(m.symmetry, r.t.action_prev);
    mt.torques = mirror_joint_vector(m.symmetry, r.t.torques);
    for (std::size_t f = 0; f < mt.feet.size(); ++f) mt.feet[f] = r.t.feet[m.symmetry.foot_perm[f]];
    const auto mirrored = compute_reward_terms(m, mt, RewardConfig{});
    ASSERT_NEAR(mirrored.total, base.total, 1e-9 * std::max(1.0, std::abs(base.total))) << i;
  }
}

TEST(FeetPhase, AirTimeAndHeightBookkeeping) {
  const auto m = make_mini_humanoid();
  BodyState b = body_state(m, make_state(m));
  std::vector<FootPhase> phases;
  auto set = [&](double f0, double h0) {
    b.feet[0].force = Vec3(0, 0, f0);
    b.feet[0].height = h0;
    b.feet[1].force = Vec3(0, 0, 100);
  };
  set(100, 0);
  auto e = update_feet(phases, b, 0.02, 1.0);
  EXPECT_FALSE(e[0].first_step);
  for (double h : {0.05, 0.12, 0.08}) {
    set(0.5, h);
    e = update_feet(phases, b, 0.02, 1.0);
    EXPECT_TRUE(e[0].in_air);
  }
  EXPECT_DOUBLE_EQ(e[0].max_height, 0.12);
  set(80, 0);
  e = update_feet(phases, b, 0.02, 1.0);
  EXPECT_TRUE(e[0].first_step);
  EXPECT_NEAR(e[0].air_time, 0.06, 1e-15);
  EXPECT_FALSE(e[1].first_step);
  e = update_feet(phases, b, 0.02, 1.0);
  EXPECT_FALSE(e[0].first_step);
}

TEST(Observation, LayoutLengths) {
  const auto m = make_mini_humanoid();
  const ObsLayout l = make_layout(m, EnvConfig{});
  // 6n + 22K + L + 4F + 9 with n=12, K=11, L=13, F=2.
  EXPECT_EQ(l.teacher(), 6 * 12 + 22 * 11 + 13 + 4 * 2 + 9);
  EXPECT_EQ(l.teacher(), 344);
  EXPECT_EQ(l.proprio(), 75);
  EXPECT_EQ(l.student(), 10 * 75 + 10 * 33);
  EXPECT_EQ(l.student(), 1080);
  EnvConfig dof;
  dof.goal_representation = "dofs";
  const ObsLayout ld = make_layout(m, dof);
  EXPECT_EQ(ld.teacher(), 344 - 66 + 24);
  EXPECT_EQ(ld.student(), 750 + 120);
}

TEST(Observation, OnGoalDifferenceIsZeroAndPrivilegedPassThrough) {
  const auto m = make_mini_humanoid();
  const ObsLayout l = make_layout(m, EnvConfig{});
  Rng rng(5);
  const auto params = sample_randomization(m, DomainRandConfig{}, 1.0, rng);
  SimState s = random_state(m, rng);
  const BodyState b = body_state(m, s);
  const GoalFrame g = goal_from_state(m, s);
  const VecX obs = build_teacher_obs(l, s, b, VecX::Zero(12), g, params, ObsNoise{});
  const int diff = l.proprio() + l.global() + 3 * l.K;
  EXPECT_EQ(obs.segment(diff, 3 * l.K).cwiseAbs().maxCoeff(), 0.0);
  const int priv = l.proprio() + l.global() + l.goal();
  EXPECT_EQ(obs.segment<3>(priv), params.com_bias);
  EXPECT_EQ(obs[priv + 3], params.foot_friction[0]);
  EXPECT_EQ(obs.segment(priv + 5, 13), params.mass_scale);
  EXPECT_EQ(obs.segment(priv + 18, 12), params.kd_scale);
  EXPECT_EQ(obs.segment(priv + 30, 12), params.kp_scale);
  EXPECT_EQ(obs.segment(priv + 42, 12), params.torque_scale);
}

TEST(Observation, ZeroNoiseMatchesCritic) {
  const auto m = make_mini_humanoid();
  const ObsLayout l = make_layout(m, EnvConfig{});
  Rng rng(8);
  auto cfg = DomainRandConfig{};
  cfg.noise_joint_pos = cfg.noise_joint_vel = cfg.noise_root_angvel = cfg.noise_gravity = 0.0;
  cfg.noise_local_pos = cfg.noise_global_pos = cfg.noise_global_quat = cfg.noise_global_linvel = 0.0;
  cfg.noise_global_angvel = cfg.noise_goal = 0.0;
  const auto params = nominal_params(m, 1.0);
  SimState s = random_state(m, rng);
  const BodyState b = body_state(m, s);
  const GoalFrame g = goal_from_state(m, s);
  Rng noise(1);
  const VecX a = build_teacher_obs(l, s, b, VecX::Ones(12), g, params, ObsNoise{&cfg, &noise, Vec3::Zero()});
  const VecX c = build_teacher_obs(l, s, b, VecX::Ones(12), g, params, ObsNoise{});
  EXPECT_EQ(a, c);
  cfg.noise_joint_pos = 0.01;
  const VecX d = build_teacher_obs(l, s, b, VecX::Ones(12), g, params, ObsNoise{&cfg, &noise, Vec3::Zero()});
  EXPECT_NE(d.head(12), c.head(12));
  EXPECT_EQ(d.tail(l.privileged()), c.tail(l.privileged()));
}

TEST(Observation, TeacherAndStudentMirrorEquivariant) {
  const auto m = make_mini_humanoid();
  for (const char* rep : {"keypoints", "dofs"}) {
    EnvConfig ec;
    ec.goal_representation = rep;
    const ObsLayout l = make_layout(m, ec);
    const auto T = teacher_mirror(m, l);
    const auto S = student_mirror(m, l);
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
      SimState s = random_state(m, rng);
      for (auto& f : s.contact_forces) f = random_vec3(rng, 40.0);
      const auto params = sample_randomization(m, DomainRandConfig{}, 1.0, rng);
      const GoalFrame g = goal_from_state(m, random_state(m, rng));
      const VecX a = VecX::Random(12);
      const SimState ms = mirror_state(m, s);
      const BodyState b = body_state(m, s), mb = body_state(m, ms);
      const GoalFrame mg = mirror_goal_frame(m, g);
      const auto mp = mirror_params(m, params);
      const VecX ma = mirror_joint_vector(m.symmetry, a);
      const VecX o = build_teacher_obs(l, s, b, a, g, params, ObsNoise{});
      const VecX mo = build_teacher_obs(l, ms, mb, ma, mg, mp, ObsNoise{});
      ASSERT_LT((T.apply(o) - mo).cwiseAbs().maxCoeff(), 1e-9) << rep << " " << i;
      ASSERT_LT((T.apply(T.apply(o)) - o).cwiseAbs().maxCoeff(), 0.0 + 1e-15);

      std::deque<VecX> h(l.history, build_proprio(s, b, a, ObsNoise{}));
      std::deque<VecX> mh(l.history, build_proprio(ms, mb, ma, ObsNoise{}));
      std::vector<VecX> fut(l.future, student_goal_frame(l, b, g, ObsNoise{}));
      std::vector<VecX> mfut(l.future, student_goal_frame(l, mb, mg, ObsNoise{}));
      const VecX so = build_student_obs(l, h, fut);
      const VecX mso = build_student_obs(l, mh, mfut);
      ASSERT_LT((S.apply(so) - mso).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(Termination, Cases) {
  const auto m = make_mini_humanoid();
  SimState s = make_state(m);
  s.base_position.z() = 0.8;
  BodyState b = body_state(m, s);
  GoalFrame g = goal_from_state(m, s);
  const EnvConfig c;
  EXPECT_FALSE(check_termination(b, g, c).terminated);
  GoalFrame off = g;
  off.keypoints.row(0).array() += 0.6;
  const auto t = check_termination(b, off, c);
  EXPECT_TRUE(t.terminated);
  EXPECT_EQ(t.reason, "deviation");
  s.base_orientation = axis_angle(Vec3::UnitY(), kPi / 3);
  b = body_state(m, s);
  EXPECT_NEAR(std::abs(b.gravity.x()), std::sin(kPi / 3), 1e-12);
  const auto f = check_termination(b, goal_from_state(m, s), c);
  EXPECT_TRUE(f.terminated);
  EXPECT_EQ(f.reason, "fall");
}

TEST(Termination, MonotoneInDeviation) {
  const auto m = make_mini_humanoid();
  Rng rng(2);
  const EnvConfig c;
  for (int i = 0; i < 200; ++i) {
    SimState s = make_state(m);
    s.base_position.z() = 0.8;
    const BodyState b = body_state(m, s);
    GoalFrame g = goal_from_state(m, s);
    for (int k = 0; k < m.num_keypoints(); ++k) g.keypoints.col(k) += random_vec3(rng, 0.5);
    const bool before = check_termination(b, g, c).terminated;
    for (int k = 0; k < m.num_keypoints(); ++k)
      g.keypoints.col(k) += (g.keypoints.col(k) - b.keypoints.col(k)) * rng.uniform(0.0, 0.5);
    if (before) EXPECT_TRUE(check_termination(b, g, c).terminated);
  }
}

TEST(Randomization, RangesAndDegenerateCase) {
  const auto m = make_mini_humanoid();
  Rng rng(9);
  const DomainRandConfig c;
  for (int i = 0; i < 500; ++i) {
    const auto p = sample_randomization(m, c, 1.0, rng);
    for (double f : p.foot_friction) {
      EXPECT_GE(f, 0.4);
      EXPECT_LE(f, 1.25);
    }
    EXPECT_GE(p.delay, 0);
    EXPECT_LE(p.delay, 3);
    EXPECT_GE(p.torque_scale.minCoeff(), 0.5);
    EXPECT_LE(p.torque_scale.maxCoeff(), 1.5);
    EXPECT_LE(p.goal_offset.cwiseAbs().maxCoeff(), 0.02);
  }
  DomainRandConfig d;
  d.friction_range = {0.8, 0.8};
  d.com_offset = {0.01, 0.01};
  d.mass_scale = {1.1, 1.1};
  d.kp_scale = d.kd_scale = d.torque_scale = {0.9, 0.9};
  d.max_delay = 0;
  d.goal_offset_range = {0.0, 0.0};
  Rng r1(1), r2(2);
  const auto a = sample_randomization(m, d, 1.0, r1);
  const auto b = sample_randomization(m, d, 1.0, r2);
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_EQ(a.foot_friction[0], 0.8);
  const auto rm = randomized_model(m, a);
  EXPECT_NEAR(rm.total_mass(), 1.1 * m.total_mass(), 1e-12);
  EXPECT_THROW(rand_config_from_json(Json{{"friction_range", {2.0, 1.0}}}), ConfigError);
}

TEST(TrackingEnv, StandingStubSurvivesWholeClip) {
  const auto m = make_mini_humanoid();
  auto spec = quiet_spec(m, {stand_clip(m, 2.0)});
  spec.env.resample_on_motion_end = false;
  TrackingEnv env(spec, 1);
  env.reset();
  EXPECT_EQ(env.teacher_obs().size(), 344);
  const VecX zero = VecX::Zero(12);
  int steps = 0;
  EnvStep r;
  do {
    r = env.step(zero);
    ++steps;
    EXPECT_FALSE(r.terminated) << r.reason;
    EXPECT_EQ(r.reward[kAlive], 1.0);
    EXPECT_GT(r.reward[kBodyPos], 0.9);
  } while (!r.done());
  EXPECT_EQ(r.reason, "motion_end");
  EXPECT_EQ(steps, 100);
}

TEST(TrackingEnv, RandomStartDrawsWholeFrames) {
  const auto m = make_mini_humanoid();
  GenParams p;
  p.kind = "wave";
  p.duration = 1.0;
  auto spec = quiet_spec(m, {generate(p, m)});
  spec.env.random_start = true;
  TrackingEnv env(spec, 5);
  std::set<int> starts;
  for (int i = 0; i < 200; ++i) {
    env.reset();
    const double frame = env.motion_time() * 50.0;
    EXPECT_NEAR(frame, std::round(frame), 1e-9);
    EXPECT_LT(frame, 49.5);
    starts.insert(static_cast<int>(std::round(frame)));
    // The robot starts on the goal frame it is asked to track.
    EXPECT_LT((env.state().q - env.current_goal().q).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_GT(starts.size(), 30u);
}

TEST(TrackingEnv, MotionEndResamplesWithoutReset) {
  const auto m = make_mini_humanoid();
  GenParams p;
  p.kind = "wave";
  p.duration = 1.0;
  auto spec = quiet_spec(m, {stand_clip(m, 1.0), generate(p, m)});
  TrackingEnv env(spec, 3);
  env.reset(0);
  bool resampled = false;
  for (int i = 0; i < 60; ++i) {
    const auto r = env.step_kinematic();
    ASSERT_FALSE(r.done());
    if (r.motion_resampled) {
      resampled = true;
      EXPECT_EQ(i, 49);
      EXPECT_EQ(env.episode_step(), 50);
      // The new motion starts where the robot is.
      EXPECT_LT((env.track().frames[0].root.position.head<2>() - env.state().base_position.head<2>()).norm(), 1e-12);
    }
  }
  EXPECT_TRUE(resampled);
  EXPECT_EQ(env.episode_step(), 60);
}

TEST(TrackingEnv, PushEveryFiveSeconds) {
  const auto m = make_mini_humanoid();
  auto rand = DomainRandConfig::none();
  rand.push = true;
  auto spec = make_env_spec(m, {stand_clip(m, 8.0)}, EnvConfig{}, RewardConfig{}, rand);
  spec.env.terminate = false;
  TrackingEnv env(spec, 4);
  env.reset();
  std::vector<int> push_steps;
  for (int i = 0; i < 260; ++i) {
    const auto r = env.step(VecX::Zero(12));
    if (r.push) {
      push_steps.push_back(env.episode_step());
      EXPECT_LE(r.push->head<2>().cwiseAbs().maxCoeff(), 1.0);
      EXPECT_EQ(r.push->z(), 0.0);
    }
  }
  ASSERT_EQ(push_steps.size(), 1u);
  EXPECT_EQ(push_steps[0], 251);  // applied at the start of the step at t = 5 s
}

TEST(TrackingEnv, StudentWindowsPadded) {
  const auto m = make_mini_humanoid();
  auto spec = quiet_spec(m, {stand_clip(m, 1.0)});
  spec.build_student = true;
  spec.env.resample_on_motion_end = false;
  TrackingEnv env(spec, 5);
  env.reset();
  const ObsLayout& l = env.layout();
  const VecX& s = env.student_obs();
  ASSERT_EQ(s.size(), 1080);
  for (int h = 1; h < l.history; ++h) EXPECT_EQ(s.segment(h * l.proprio(), l.proprio()), s.head(l.proprio()));
  for (int i = 0; i < 45; ++i) env.step_kinematic();
  // 5 frames from the end: the last 5 of 10 future slots repeat the final frame.
  const VecX& t = env.student_obs();
  const int g0 = l.history * l.proprio();
  const int w = l.student_goal_frame();
  for (int k = 5; k < l.future; ++k) EXPECT_EQ(t.segment(g0 + k * w, w), t.segment(g0 + 4 * w, w));
}

TEST(TrackingEnv, DeterministicPerSeed) {
  const auto m = make_mini_humanoid();
  GenParams p;
  p.kind = "walk_in_place";
  p.duration = 2.0;
  p.amplitude = 0.2;
  const auto spec = make_env_spec(m, {generate(p, m), stand_clip(m)});
  TrackingEnv a(spec, 11), b(spec, 11);
  a.reset();
  b.reset();
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    VecX act(12);
    for (int j = 0; j < 12; ++j) act[j] = rng.normal(0.0, 0.3);
    const auto ra = a.step(act);
    const auto rb = b.step(act);
    ASSERT_EQ(ra.reward.total, rb.reward.total);
    ASSERT_EQ(a.teacher_obs(), b.teacher_obs());
  }
}

TEST(TrackingEnv, FixedBaseArm) {
  const auto m = make_single_joint_arm();
  MotionClip c;
  c.name = "arm";
  c.joint_names = {"shoulder"};
  for (int i = 0; i < 50; ++i) {
    MotionFrame f;
    f.q = VecX::Constant(1, 0.5 * std::sin(i * 0.1));
    c.frames.push_back(f);
  }
  auto spec = quiet_spec(m, {c});
  TrackingEnv env(spec, 2);
  env.reset();
  EXPECT_EQ(env.teacher_obs().size(), env.layout().teacher());
  const auto r = env.step(VecX::Zero(1));
  EXPECT_TRUE(std::isfinite(r.reward.total));
}

TEST(TrackingEnv, SaveLoadContinuesBitExactly) {
  const auto m = make_mini_humanoid();
  GenParams p;
  p.kind = "wave";
  p.duration = 1.0;
  auto spec = make_env_spec(m, {generate(p, m), stand_clip(m, 1.0)});
  spec.build_student = true;
  TrackingEnv a(spec, 21);
  a.reset();
  Rng rng(4);
  auto act = [&] {
    VecX v(12);
    for (int j = 0; j < 12; ++j) v[j] = rng.normal(0.0, 0.2);
    return v;
  };
  for (int i = 0; i < 70; ++i) a.step(act());
  const Json saved = Json::parse(a.save().dump());
  TrackingEnv b(spec, 999);
  b.reset();
  b.load(saved);
  EXPECT_EQ(a.student_obs(), b.student_obs());
  for (int i = 0; i < 60; ++i) {
    const VecX u = act();
    const auto ra = a.step(u);
    const auto rb = b.step(u);
    ASSERT_EQ(ra.reward.total, rb.reward.total) << i;
    ASSERT_EQ(a.teacher_obs(), b.teacher_obs());
    ASSERT_EQ(a.student_obs(), b.student_obs());
  }
}
