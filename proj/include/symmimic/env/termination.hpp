#pragma once

#include <string>

#include "symmimic/env/body.hpp"
#include "symmimic/env/config.hpp"
#include "symmimic/motion/goal.hpp"

namespace symmimic {

struct Termination {
  bool terminated = false;
  std::string reason;  // "deviation" | "fall" | "instability"
};

/// Mean distance between robot and goal keypoints, m.
inline double mean_keypoint_deviation(const Points& robot, const Points& goal) {
  return (robot - goal).colwise().norm().mean();
}

inline Termination check_termination(const BodyState& b, const GoalFrame& goal, const EnvConfig& c) {
  if (mean_keypoint_deviation(b.keypoints, goal.keypoints) > c.termination_distance) return {true, "deviation"};
  const Vec3 g = b.gravity.normalized();
  if (std::abs(g.x()) > c.termination_gravity_xy || std::abs(g.y()) > c.termination_gravity_xy) return {true, "fall"};
  return {};
}

}  // namespace symmimic
