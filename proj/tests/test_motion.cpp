#include <gtest/gtest.h>

#include <set>

#include "symmimic/model/symmetry.hpp"
#include "symmimic/motion/corrupt.hpp"
#include "symmimic/motion/generate.hpp"
#include "symmimic/motion/goal.hpp"
#include "symmimic/motion/retarget.hpp"
#include "test_support.hpp"

using namespace symmimic;

namespace {

MotionClip gen(const RobotModel& m, const std::string& kind, double duration = 2.0, double amplitude = 0.6,
               const std::string& side = "left") {
  GenParams p;
  p.kind = kind;
  p.duration = duration;
  p.amplitude = amplitude;
  p.side = side;
  return generate(p, m);
}

void expect_clips_equal(const MotionClip& a, const MotionClip& b, double tol = 0.0) {
  ASSERT_EQ(a.num_frames(), b.num_frames());
  EXPECT_EQ(a.fps, b.fps);
  EXPECT_EQ(a.joint_names, b.joint_names);
  for (int i = 0; i < a.num_frames(); ++i) {
    EXPECT_LE((a.frames[i].q - b.frames[i].q).cwiseAbs().maxCoeff(), tol) << "frame " << i;
    EXPECT_LE((a.frames[i].root_position - b.frames[i].root_position).cwiseAbs().maxCoeff(), tol);
    EXPECT_LE((a.frames[i].root_orientation.coeffs() - b.frames[i].root_orientation.coeffs()).cwiseAbs().maxCoeff(),
              tol);
  }
}

MotionClip two_frame_clip() {
  MotionClip c;
  c.name = "two";
  c.fps = 1.0;
  c.joint_names = {"a", "b"};
  MotionFrame f0, f1;
  f0.q = VecX::Zero(2);
  f1.q = (VecX(2) << 1.0, -0.4).finished();
  f0.root_position = Vec3(0, 0, 1);
  f1.root_position = Vec3(2, 0, 1);
  f1.root_orientation = yaw_quat(kPi / 2);
  c.frames = {f0, f1};
  return c;
}

// Mini-humanoid with every length below the pelvis doubled.
RobotModel long_legged() {
  RobotModel m = make_mini_humanoid();
  m.name = "long-legs";
  for (auto& j : m.joints)
    if (j.weight_class == WeightClass::kLower) j.origin.z() *= 2.0;
  for (auto& s : m.contact_spheres) {
    s.offset *= 2.0;
    s.radius *= 2.0;
  }
  return m;
}

}  // namespace

TEST(MotionClip, SaveLoadRoundTrip) {
  const auto m = make_mini_humanoid();
  const auto dir = symmimic::testing::scratch_dir("motion_rt");
  for (const auto& c : generate_dataset(m, 6, 3, 1.0)) {
    save_clip(c, dir / "c.json");
    const auto back = load_clip(dir / "c.json");
    EXPECT_EQ(back.name, c.name);
    EXPECT_EQ(back.provenance, c.provenance);
    expect_clips_equal(back, c);
  }
}

TEST(MotionClip, SingleFrameRejected) {
  auto c = two_frame_clip();
  c.frames.pop_back();
  try {
    validate(c);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(">= 2 frames required"), std::string::npos);
  }
}

TEST(MotionClip, MismatchedJointCountNamesFrame) {
  auto c = two_frame_clip();
  c.joint_names.clear();
  c.frames.push_back(c.frames[0]);
  c.frames[2].q = VecX::Zero(3);
  try {
    validate(c);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("frame 2"), std::string::npos);
  }
}

TEST(MotionClip, MalformedDocumentIsParseError) {
  Json j = clip_to_json(two_frame_clip());
  j["frames"][0].erase("q");
  EXPECT_THROW(clip_from_json(j), ParseError);
  j = clip_to_json(two_frame_clip());
  j["extra"] = 1;
  EXPECT_THROW(clip_from_json(j), ParseError);
}

TEST(Resample, SameFpsIsIdentity) {
  const auto c = gen(make_mini_humanoid(), "wave");
  expect_clips_equal(resample(c, c.fps), c);
}

TEST(Resample, LinearMidpointAndSlerp) {
  const auto c = two_frame_clip();
  const auto r = resample(c, 50.0);
  ASSERT_EQ(r.num_frames(), 51);
  const auto& mid = r.frames[25];
  EXPECT_NEAR(mid.q[0], 0.5, 1e-12);
  EXPECT_NEAR(mid.q[1], -0.2, 1e-12);
  EXPECT_NEAR(mid.root_position.x(), 1.0, 1e-12);
  // slerp halfway between identity and a 90 degree yaw is a 45 degree yaw.
  EXPECT_NEAR(yaw_of(mid.root_orientation), kPi / 4, 1e-12);
  EXPECT_NEAR(quat_distance(mid.root_orientation, yaw_quat(kPi / 4)), 0.0, 1e-9);
  EXPECT_NEAR(r.duration(), c.duration(), 1.0 / 50.0);
}

TEST(Resample, DurationPreservedWithinOneFrame) {
  const auto c = gen(make_mini_humanoid(), "squat", 1.37);
  for (double fps : {30.0, 60.0, 100.0, 7.0}) {
    const auto r = resample(c, fps);
    EXPECT_LE(std::abs(r.duration() - c.duration()), 1.0 / fps);
  }
  EXPECT_THROW(resample(c, 0.0), ConfigError);
}

TEST(Generate, StandIsDefaultPose) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "stand");
  EXPECT_EQ(c.num_frames(), 101);
  EXPECT_EQ(c.fps, 50.0);
  for (const auto& f : c.frames) {
    EXPECT_EQ(f.q, m.default_pose());
    EXPECT_EQ(f.root_position, c.frames[0].root_position);
  }
  // Standing height puts the lowest sphere on the ground.
  const auto poses = forward_kinematics(m, {c.frames[0].root_position, Quat::Identity()}, m.default_pose());
  double lowest = 1e9;
  for (const auto& s : m.contact_spheres) lowest = std::min(lowest, poses[s.link].apply(s.offset).z() - s.radius);
  EXPECT_NEAR(lowest, 0.0, 1e-12);
}

TEST(Generate, ZeroAmplitudeWaveEqualsStand) {
  const auto m = make_mini_humanoid();
  expect_clips_equal(gen(m, "wave", 2.0, 0.0), gen(m, "stand"));
}

TEST(Generate, CompositeIsContinuousAtSeam) {
  const auto m = make_mini_humanoid();
  GenParams p;
  p.kind = "composite";
  GenParams w, r;
  w.kind = "wave";
  w.duration = 2.0;
  r.kind = "reach";
  r.duration = 3.0;
  p.parts = {w, r};
  const auto c = generate(p, m);
  const auto cw = generate(w, m);
  const auto cr = generate(r, m);
  EXPECT_EQ(c.num_frames(), cw.num_frames() + cr.num_frames());
  const int seam = cw.num_frames();
  EXPECT_LT((c.frames[seam].q - c.frames[seam - 1].q).cwiseAbs().maxCoeff(), 1e-9);
  // Everywhere else the per-frame step stays small.
  for (int i = 1; i < c.num_frames(); ++i)
    EXPECT_LT((c.frames[i].q - c.frames[i - 1].q).cwiseAbs().maxCoeff(), 0.2) << i;
}

TEST(Generate, AllKindsInsideLimits) {
  const auto m = make_mini_humanoid();
  for (const auto& c : generate_dataset(m, 24, 11, 3.0)) {
    EXPECT_NO_THROW(validate(c));
    EXPECT_DOUBLE_EQ(retarget_error(c, m), 0.0) << c.name;
  }
}

TEST(Generate, InPlaceKindsKeepRootHeight) {
  const auto m = make_mini_humanoid();
  for (const char* k : {"stand", "wave", "reach", "walk_in_place"}) {
    const auto c = gen(m, k);
    for (const auto& f : c.frames) EXPECT_EQ(f.root_position, c.frames[0].root_position) << k;
  }
}

TEST(Generate, OutOfLimitParamsRejected) {
  const auto m = make_mini_humanoid();
  EXPECT_THROW(gen(m, "wave", 2.0, 5.0), ValidationError);
  EXPECT_THROW(gen(m, "cartwheel"), ConfigError);
  EXPECT_THROW(gen(make_single_joint_arm(), "squat"), ConfigError);
}

TEST(Corrupt, AllZeroSpecIsIdentity) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "wave");
  NoiseSpec s;
  s.seed = 99;
  const auto r = corrupt(c, s, m);
  expect_clips_equal(r.clip, c);
  EXPECT_TRUE(r.clip.is_clean());
  EXPECT_TRUE(r.log.empty());
}

TEST(Corrupt, WholeClipSwapOfSymmetricWaveIsMirror) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "wave", 2.0, 0.6, "both");
  NoiseSpec s;
  s.lr_swap_prob = 1.0;
  s.lr_swap_duration = 100.0;
  const auto r = corrupt(c, s, m);
  for (int i = 0; i < c.num_frames(); ++i) {
    EXPECT_EQ(r.clip.frames[i].q, mirror_joint_vector(m.symmetry, c.frames[i].q));
    // The symmetric clip is its own mirror.
    EXPECT_LT((r.clip.frames[i].q - c.frames[i].q).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_EQ(r.clip.provenance["source"], "corrupted");
  EXPECT_EQ(r.clip.provenance["corruptions"], Json::array({"lr_swap"}));
}

TEST(Corrupt, DriftAccumulatesLinearly) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "stand", 5.0);
  NoiseSpec s;
  s.drift_rate = 0.1;
  s.seed = 4;
  const auto r = corrupt(c, s, m);
  const Vec3 d = r.clip.frames.back().root_position - c.frames.back().root_position;
  EXPECT_NEAR(d.norm(), 0.5, 1e-12);
  EXPECT_NEAR(d.z(), 0.0, 1e-15);
}

TEST(Corrupt, OcclusionFreezesLimbs) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "wave", 2.0, 0.8, "both");
  NoiseSpec s;
  s.occlusion_prob = 1.0;
  s.occlusion_hold = 0.5;
  const auto r = corrupt(c, s, m);
  // Every limb is frozen for every 25-frame segment.
  for (int i = 0; i < c.num_frames(); ++i) {
    const int s0 = (i / 25) * 25;
    EXPECT_EQ(r.clip.frames[i].q, c.frames[s0].q) << i;
  }
}

TEST(Corrupt, SpikesClampedToWidenedLimits) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "reach");
  NoiseSpec s;
  s.spike_prob = 1.0;
  s.spike_magnitude = 10.0;
  const auto r = corrupt(c, s, m);
  int outside = 0;
  for (const auto& f : r.clip.frames)
    for (int j = 0; j < m.num_joints(); ++j) {
      EXPECT_LE(f.q[j], m.joints[j].upper + 0.2 + 1e-12);
      EXPECT_GE(f.q[j], m.joints[j].lower - 0.2 - 1e-12);
      outside += f.q[j] > m.joints[j].upper || f.q[j] < m.joints[j].lower;
    }
  EXPECT_EQ(outside, c.num_frames());
  EXPECT_GT(retarget_error(r.clip, m), 0.0);
}

TEST(Corrupt, DeterministicPerSeed) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "walk_in_place");
  NoiseSpec s;
  s.keypoint_noise_std = 0.02;
  s.occlusion_prob = 0.3;
  s.spike_prob = 0.05;
  s.spike_magnitude = 0.5;
  s.drift_rate = 0.05;
  s.lr_swap_prob = 0.5;
  s.seed = 1;
  const auto a = corrupt(c, s, m);
  const auto b = corrupt(c, s, m);
  expect_clips_equal(a.clip, b.clip);
  EXPECT_EQ(a.log, b.log);
  s.seed = 2;
  const auto d = corrupt(c, s, m);
  EXPECT_GT((d.clip.frames[10].q - a.clip.frames[10].q).norm(), 0.0);
}

TEST(Corrupt, InvalidSpecRejected) {
  const auto m = make_mini_humanoid();
  NoiseSpec s;
  s.occlusion_prob = 1.5;
  EXPECT_THROW(corrupt(gen(m, "stand"), s, m), ConfigError);
  EXPECT_THROW(noise_spec_from_json(Json{{"keypoint_noise_std", -1.0}}), ConfigError);
  EXPECT_THROW(noise_spec_from_json(Json{{"bogus", 1.0}}), ConfigError);
}

TEST(Retarget, SameModelIsIdentity) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "wave");
  const auto r = retarget_scale(c, m, m);
  expect_clips_equal(r.clip, c);
  EXPECT_EQ(r.clamp_count, 0);
}

TEST(Retarget, DoubleLegsDoubleRootHeight) {
  const auto m = make_mini_humanoid();
  const auto big = long_legged();
  const auto c = gen(m, "stand");
  const auto r = retarget_scale(c, m, big);
  EXPECT_NEAR(r.clip.frames[0].root_position.z(), 2.0 * c.frames[0].root_position.z(), 1e-12);
}

TEST(Retarget, ClampsIntoDestinationLimits) {
  const auto m = make_mini_humanoid();
  auto tight = m;
  const int knee = tight.find_joint("left_knee");
  tight.joints[knee].upper = 0.5;
  auto c = gen(m, "stand");
  for (int i = 0; i < 4; ++i) c.frames[i].q[knee] = 1.0;
  const auto r = retarget_scale(c, m, tight);
  EXPECT_EQ(r.clamp_count, 4);
  EXPECT_EQ(r.clip.frames[0].q[knee], 0.5);
}

TEST(Retarget, TopologyMismatchRejected) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "stand");
  EXPECT_THROW(retarget_scale(c, m, make_single_joint_arm()), DataError);
  auto renamed = m;
  renamed.joints[0].name = "left_hip_yaw";
  EXPECT_THROW(retarget_scale(c, m, renamed), DataError);
}

TEST(Dataset, FilterByRetargetError) {
  const auto m = make_mini_humanoid();
  auto clean = gen(m, "stand");
  auto bad = clean;
  bad.name = "bad";
  for (auto& f : bad.frames) f.q[1] = m.joints[1].upper + 0.1;
  EXPECT_NEAR(retarget_error(bad, m), 0.1, 1e-12);
  EXPECT_EQ(filter_dataset({clean, bad}, m, 0.0).size(), 1u);
  EXPECT_EQ(filter_dataset({clean, bad}, m, 0.0)[0].name, clean.name);
  EXPECT_EQ(filter_dataset({clean, bad}, m, 0.1).size(), 2u);
}

TEST(Dataset, SplitSizesAndDeterminism) {
  const auto m = make_mini_humanoid();
  const auto clips = generate_dataset(m, 10, 5, 0.5);
  const auto [train, test] = split_dataset(clips, 0.9, 42);
  EXPECT_EQ(train.size(), 9u);
  EXPECT_EQ(test.size(), 1u);
  std::set<std::string> names;
  for (const auto& c : train) names.insert(c.name);
  for (const auto& c : test) names.insert(c.name);
  EXPECT_EQ(names.size(), 10u);
  const auto again = split_dataset(clips, 0.9, 42);
  EXPECT_EQ(again.second[0].name, test[0].name);

  const auto [a, b] = split_dataset({clips[0], clips[1]}, 0.5, 1);
  EXPECT_EQ(a.size(), 1u);
  EXPECT_EQ(b.size(), 1u);
  EXPECT_THROW(split_dataset(clips, 1.0, 0), ConfigError);
}

TEST(Dataset, SaveAndLoadDirectory) {
  const auto m = make_mini_humanoid();
  const auto dir = symmimic::testing::scratch_dir("motion_ds");
  const auto clips = generate_dataset(m, 4, 8, 0.5);
  save_dataset(clips, dir);
  const auto back = load_dataset(dir);
  ASSERT_EQ(back.size(), 4u);
  EXPECT_THROW(load_dataset(dir / "missing"), DataError);
}

TEST(GoalTrack, MatchesForwardKinematics) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "walk_in_place");
  const auto g = make_goal_track(c, m);
  ASSERT_EQ(g.num_frames(), c.num_frames());
  const int i = 37;
  const auto poses = forward_kinematics(m, {c.frames[i].root_position, c.frames[i].root_orientation}, c.frames[i].q);
  EXPECT_LT((g.frames[i].keypoints - keypoints_global(m, poses)).cwiseAbs().maxCoeff(), 1e-15);
  // Central difference oracle.
  const VecX qd = (c.frames[i + 1].q - c.frames[i - 1].q) * (c.fps / 2.0);
  EXPECT_LT((g.frames[i].qd - qd).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(g.index_at(0.5), 25);
  EXPECT_EQ(g.index_at(99.0), g.num_frames() - 1);
}

TEST(GoalTrack, RootAngularVelocityFromYawRate) {
  const auto m = make_mini_humanoid();
  auto c = gen(m, "stand");
  for (int i = 0; i < c.num_frames(); ++i) c.frames[i].root_orientation = yaw_quat(0.3 * i / c.fps);
  const auto g = make_goal_track(c, m);
  EXPECT_NEAR(g.frames[10].root_angular_velocity.z(), 0.3, 1e-12);
  EXPECT_NEAR(g.frames[0].root_angular_velocity.z(), 0.3, 1e-12);
}

TEST(GoalTrack, BitIdenticalOnRepeat) {
  const auto m = make_mini_humanoid();
  const auto c = gen(m, "squat");
  const auto a = make_goal_track(c, m);
  const auto b = make_goal_track(c, m);
  for (int i = 0; i < a.num_frames(); ++i) {
    EXPECT_EQ(a.frames[i].keypoints, b.frames[i].keypoints);
    EXPECT_EQ(a.frames[i].qd, b.frames[i].qd);
  }
}
