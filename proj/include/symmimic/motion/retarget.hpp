#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/rng.hpp"
#include "symmimic/motion/clip.hpp"
#include "symmimic/motion/generate.hpp"

namespace symmimic {

struct RetargetResult {
  MotionClip clip;
  int clamp_count = 0;  // clamped (frame, joint) entries
};

namespace detail {

inline std::string parent_link_name(const RobotModel& m, int joint) {
  return m.links[m.joints[joint].parent].name;
}

/// Index of each dst joint in src; throws DataError on a topology mismatch.
inline std::vector<int> joint_mapping(const RobotModel& src, const RobotModel& dst) {
  if (src.num_joints() != dst.num_joints())
    throw DataError("retarget: topology mismatch, '" + src.name + "' has " + std::to_string(src.num_joints()) +
                    " joints and '" + dst.name + "' has " + std::to_string(dst.num_joints()));
  if (src.fixed_base != dst.fixed_base) throw DataError("retarget: topology mismatch in base type");
  std::vector<int> map(dst.num_joints());
  for (int j = 0; j < dst.num_joints(); ++j) {
    const int s = src.find_joint(dst.joints[j].name);
    if (s < 0) throw DataError("retarget: topology mismatch, joint '" + dst.joints[j].name + "' missing in source");
    if (parent_link_name(src, s) != parent_link_name(dst, j))
      throw DataError("retarget: topology mismatch, joint '" + dst.joints[j].name + "' has a different parent");
    map[j] = s;
  }
  return map;
}

}  // namespace detail

/// Copies joint angles by name, scales the root position by the ratio of
/// standing pelvis heights (dst/src) and clamps angles into dst limits.
inline RetargetResult retarget_scale(const MotionClip& clip, const RobotModel& src, const RobotModel& dst) {
  check_compatible(clip, src);
  const auto map = detail::joint_mapping(src, dst);
  const double hs = detail::standing_height(src, src.default_pose());
  const double hd = detail::standing_height(dst, dst.default_pose());
  const double ratio = hs > 0.0 && hd > 0.0 ? hd / hs : 1.0;

  RetargetResult r;
  r.clip = clip;
  r.clip.joint_names = joint_names(dst);
  for (auto& f : r.clip.frames) {
    VecX q(dst.num_joints());
    for (int j = 0; j < dst.num_joints(); ++j) {
      const double v = f.q[map[j]];
      q[j] = clamp(v, dst.joints[j].lower, dst.joints[j].upper);
      if (q[j] != v) ++r.clamp_count;
    }
    f.q = std::move(q);
    f.root_position *= ratio;
  }
  return r;
}

/// Mean over frames of the summed out-of-limit magnitude, rad.
inline double retarget_error(const MotionClip& clip, const RobotModel& model) {
  check_compatible(clip, model);
  double total = 0.0;
  for (const auto& f : clip.frames)
    for (int j = 0; j < model.num_joints(); ++j) {
      const auto& jt = model.joints[j];
      total += std::max({0.0, f.q[j] - jt.upper, jt.lower - f.q[j]});
    }
  return clip.frames.empty() ? 0.0 : total / clip.num_frames();
}

/// Keeps clips whose retarget_error is <= threshold.
inline std::vector<MotionClip> filter_dataset(const std::vector<MotionClip>& clips, const RobotModel& model,
                                              double threshold) {
  std::vector<MotionClip> out;
  for (const auto& c : clips)
    if (retarget_error(c, model) <= threshold) out.push_back(c);
  return out;
}

/// Seeded shuffle, then the first round(ratio * n) clips go to train.
inline std::pair<std::vector<MotionClip>, std::vector<MotionClip>> split_dataset(const std::vector<MotionClip>& clips,
                                                                                 double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0,1)");
  std::vector<std::size_t> idx(clips.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(clips.size())));
  std::pair<std::vector<MotionClip>, std::vector<MotionClip>> out;
  for (std::size_t i = 0; i < idx.size(); ++i) (i < n_train ? out.first : out.second).push_back(clips[idx[i]]);
  return out;
}

}  // namespace symmimic
