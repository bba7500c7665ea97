#pragma once

#include <map>
#include <string>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/json_util.hpp"
#include "symmimic/core/rng.hpp"
#include "symmimic/model/symmetry.hpp"
#include "symmimic/motion/clip.hpp"

// Corruptions act on joint angles and the root pose directly; there is no
// inverse kinematics. keypoint_noise_std is read through a 1 m = 1 rad
// convention at unit limb length: the same number is used as the joint-angle
// std (rad) and the root-position std (m), and as the root-orientation std
// (rad, rotation-vector noise).

namespace symmimic {

struct NoiseSpec {
  double keypoint_noise_std = 0.0;  // m
  double occlusion_prob = 0.0;      // per limb per segment
  double occlusion_hold = 0.5;      // s, segment length
  double spike_prob = 0.0;          // per frame
  double spike_magnitude = 0.0;     // rad
  double drift_rate = 0.0;          // m/s
  double lr_swap_prob = 0.0;        // per clip
  double lr_swap_duration = 1.0;    // s
  std::uint64_t seed = 0;

  bool is_identity() const {
    return keypoint_noise_std == 0.0 && occlusion_prob == 0.0 && (spike_prob == 0.0 || spike_magnitude == 0.0) &&
           drift_rate == 0.0 && lr_swap_prob == 0.0;
  }
};

inline void validate(const NoiseSpec& s) {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("noise.") + name + " must be in [0,1]");
  };
  prob(s.occlusion_prob, "occlusion_prob");
  prob(s.spike_prob, "spike_prob");
  prob(s.lr_swap_prob, "lr_swap_prob");
  if (s.keypoint_noise_std < 0.0) throw ConfigError("noise.keypoint_noise_std must be >= 0");
  if (s.spike_magnitude < 0.0) throw ConfigError("noise.spike_magnitude must be >= 0");
  if (s.drift_rate < 0.0) throw ConfigError("noise.drift_rate must be >= 0");
  if (!(s.occlusion_hold > 0.0)) throw ConfigError("noise.occlusion_hold must be positive");
  if (!(s.lr_swap_duration > 0.0)) throw ConfigError("noise.lr_swap_duration must be positive");
}

inline Json to_json(const NoiseSpec& s) {
  return {{"keypoint_noise_std", s.keypoint_noise_std},
          {"occlusion_prob", s.occlusion_prob},
          {"occlusion_hold", s.occlusion_hold},
          {"spike_prob", s.spike_prob},
          {"spike_magnitude", s.spike_magnitude},
          {"drift_rate", s.drift_rate},
          {"lr_swap_prob", s.lr_swap_prob},
          {"lr_swap_duration", s.lr_swap_duration},
          {"seed", s.seed}};
}

inline NoiseSpec noise_spec_from_json(const Json& j, NoiseSpec s = {}) {
  check_keys(j,
             {"keypoint_noise_std", "occlusion_prob", "occlusion_hold", "spike_prob", "spike_magnitude", "drift_rate",
              "lr_swap_prob", "lr_swap_duration", "seed"},
             "noise");
  read_opt(j, "keypoint_noise_std", s.keypoint_noise_std);
  read_opt(j, "occlusion_prob", s.occlusion_prob);
  read_opt(j, "occlusion_hold", s.occlusion_hold);
  read_opt(j, "spike_prob", s.spike_prob);
  read_opt(j, "spike_magnitude", s.spike_magnitude);
  read_opt(j, "drift_rate", s.drift_rate);
  read_opt(j, "lr_swap_prob", s.lr_swap_prob);
  read_opt(j, "lr_swap_duration", s.lr_swap_duration);
  read_opt(j, "seed", s.seed);
  validate(s);
  return s;
}

struct CorruptionResult {
  MotionClip clip;
  Json log = Json::array();
};

/// Limb groups used by occlusion: joints named left_/right_ split by weight
/// class (arm joints are "upper", leg joints "lower").
inline std::map<std::string, std::vector<int>> limb_groups(const RobotModel& m) {
  std::map<std::string, std::vector<int>> g;
  for (int j = 0; j < m.num_joints(); ++j) {
    const auto& n = m.joints[j].name;
    std::string side;
    if (n.rfind("left_", 0) == 0) side = "left";
    else if (n.rfind("right_", 0) == 0) side = "right";
    else continue;
    g[side + (m.joints[j].weight_class == WeightClass::kLower ? "_leg" : "_arm")].push_back(j);
  }
  return g;
}

/// Applies the corruptions of `spec` in a fixed order (lr_swap, occlusion,
/// pose spike, Gaussian noise, drift). Deterministic given the spec seed.
inline CorruptionResult corrupt(const MotionClip& clip, const NoiseSpec& spec, const RobotModel& model) {
  validate(spec);
  check_compatible(clip, model);
  CorruptionResult r{clip, Json::array()};
  if (spec.is_identity()) return r;

  auto& frames = r.clip.frames;
  const int n = clip.num_frames();
  const double fps = clip.fps;
  Rng rng(mix_seed(spec.seed, fnv1a(clip.name)));
  std::vector<std::string> applied;

  if (spec.lr_swap_prob > 0.0 && rng.bernoulli(spec.lr_swap_prob)) {
    const int len = std::min(n, std::max(1, static_cast<int>(std::llround(spec.lr_swap_duration * fps))));
    const int start = rng.integer(0, n - len);
    for (int i = start; i < start + len; ++i) frames[i].q = mirror_joint_vector(model.symmetry, frames[i].q);
    r.log.push_back({{"type", "lr_swap"}, {"start_frame", start}, {"end_frame", start + len - 1}});
    applied.push_back("lr_swap");
  }

  if (spec.occlusion_prob > 0.0) {
    const int seg = std::max(1, static_cast<int>(std::llround(spec.occlusion_hold * fps)));
    bool any = false;
    for (const auto& [name, joints] : limb_groups(model)) {
      for (int s0 = 0; s0 < n; s0 += seg) {
        if (!rng.bernoulli(spec.occlusion_prob)) continue;
        const int s1 = std::min(n, s0 + seg);
        for (int i = s0 + 1; i < s1; ++i)
          for (int j : joints) frames[i].q[j] = frames[s0].q[j];
        r.log.push_back({{"type", "occlusion"}, {"limb", name}, {"start_frame", s0}, {"end_frame", s1 - 1}});
        any = true;
      }
    }
    if (any) applied.push_back("occlusion");
  }

  if (spec.spike_prob > 0.0 && spec.spike_magnitude > 0.0) {
    bool any = false;
    for (int i = 0; i < n; ++i) {
      if (!rng.bernoulli(spec.spike_prob)) continue;
      const int j = rng.integer(0, model.num_joints() - 1);
      const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
      const auto& jt = model.joints[j];
      frames[i].q[j] = clamp(frames[i].q[j] + sign * spec.spike_magnitude, jt.lower - 0.2, jt.upper + 0.2);
      r.log.push_back({{"type", "pose_spike"}, {"frame", i}, {"joint", jt.name}, {"value", frames[i].q[j]}});
      any = true;
    }
    if (any) applied.push_back("pose_spike");
  }

  if (spec.keypoint_noise_std > 0.0) {
    const double sd = spec.keypoint_noise_std;
    for (auto& f : frames) {
      for (Eigen::Index j = 0; j < f.q.size(); ++j) f.q[j] += rng.normal(0.0, sd);
      for (int k = 0; k < 3; ++k) f.root_position[k] += rng.normal(0.0, sd);
      const Vec3 w(rng.normal(0.0, sd), rng.normal(0.0, sd), rng.normal(0.0, sd));
      f.root_orientation = (quat_exp(w) * f.root_orientation).normalized();
    }
    r.log.push_back({{"type", "keypoint_noise"}, {"std", sd}});
    applied.push_back("keypoint_noise");
  }

  if (spec.drift_rate > 0.0) {
    const double dir = rng.uniform(-kPi, kPi);
    const Vec3 v(spec.drift_rate * std::cos(dir), spec.drift_rate * std::sin(dir), 0.0);
    for (int i = 0; i < n; ++i) frames[i].root_position += v * (i / fps);
    r.log.push_back({{"type", "drift"}, {"velocity", vec3_to_json(v)}});
    applied.push_back("drift");
  }

  Json prov = {{"source", "corrupted"}, {"corruptions", applied}, {"seed", spec.seed}, {"spec", to_json(spec)},
               {"log", r.log}};
  if (!clip.is_clean()) prov["parent"] = clip.provenance;
  r.clip.provenance = prov;
  return r;
}

}  // namespace symmimic
