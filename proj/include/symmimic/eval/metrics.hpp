#pragma once

#include <string>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/model/kinematics.hpp"

namespace symmimic {

/// Robot and goal keypoints for every recorded frame of one rollout.
/// Frame 0 is the reset state; frame i follows control step i. When the
/// rollout terminated at step k, frames 0..k-1 are kept.
struct TrajectoryRecord {
  std::string motion;
  bool terminate_enabled = true;
  bool terminated = false;
  int termination_step = -1;
  std::string reason;
  std::vector<Points> robot;       // world, 3 x K per frame
  std::vector<Points> goal;
  std::vector<Pose> robot_root;
  std::vector<Pose> goal_root;

  int num_frames() const { return static_cast<int>(robot.size()); }
};

namespace detail {

inline void check_record(const TrajectoryRecord& r) {
  if (r.robot.empty()) throw ValidationError("metric on an empty record");
  if (r.goal.size() != r.robot.size() || r.robot_root.size() != r.robot.size() || r.goal_root.size() != r.robot.size())
    throw ValidationError("record series have different lengths");
}

/// Mean keypoint distance over all frames, in cm.
inline double mean_error_cm(const TrajectoryRecord& r, bool local) {
  check_record(r);
  double acc = 0.0;
  long long n = 0;
  for (int f = 0; f < r.num_frames(); ++f) {
    const Points a = local ? keypoints_local(r.robot[f], r.robot_root[f]) : r.robot[f];
    const Points b = local ? keypoints_local(r.goal[f], r.goal_root[f]) : r.goal[f];
    acc += (a - b).colwise().norm().sum();
    n += a.cols();
  }
  return 100.0 * acc / static_cast<double>(n);
}

}  // namespace detail

/// Global mean per-keypoint position error (cm) over the frames before
/// termination.
inline double mpkpe(const TrajectoryRecord& r) { return detail::mean_error_cm(r, false); }
/// As mpkpe, with each side expressed in its own pelvis heading frame.
inline double lmpkpe(const TrajectoryRecord& r) { return detail::mean_error_cm(r, true); }

inline double mpkpe_nt(const TrajectoryRecord& r) {
  if (r.terminate_enabled) throw ValidationError("no-termination metric needs a rollout without termination");
  return mpkpe(r);
}
inline double lmpkpe_nt(const TrajectoryRecord& r) {
  if (r.terminate_enabled) throw ValidationError("no-termination metric needs a rollout without termination");
  return lmpkpe(r);
}

/// Percentage of rollouts that ran to the end of the motion.
inline double success_rate(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw ValidationError("success rate of zero rollouts");
  int ok = 0;
  for (const auto& r : records) {
    if (!r.terminate_enabled) throw ValidationError("success rate needs rollouts with termination enabled");
    ok += r.terminated ? 0 : 1;
  }
  return 100.0 * ok / static_cast<double>(records.size());
}

/// Per-frame mean keypoint error (cm), for plotting.
inline std::vector<double> frame_errors_cm(const TrajectoryRecord& r, bool local) {
  detail::check_record(r);
  std::vector<double> out;
  for (int f = 0; f < r.num_frames(); ++f) {
    const Points a = local ? keypoints_local(r.robot[f], r.robot_root[f]) : r.robot[f];
    const Points b = local ? keypoints_local(r.goal[f], r.goal_root[f]) : r.goal[f];
    out.push_back(100.0 * (a - b).colwise().norm().mean());
  }
  return out;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

inline MeanStd mean_std(const std::vector<double>& v) {
  if (v.empty()) throw ValidationError("mean of an empty series");
  MeanStd m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.std += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(m.std / static_cast<double>(v.size()));
  return m;
}

}  // namespace symmimic
