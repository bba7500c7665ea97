#pragma once

#include <filesystem>
#include <string>

#include "symmimic/core/math.hpp"
#include "symmimic/core/rng.hpp"
#include "symmimic/model/robot_model.hpp"
#include "symmimic/sim/state.hpp"

namespace symmimic::testing {

inline Quat random_quat(Rng& rng) {
  Quat q(rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1));
  return q.normalized();
}

inline Vec3 random_vec3(Rng& rng, double scale = 1.0) {
  return {rng.uniform(-scale, scale), rng.uniform(-scale, scale), rng.uniform(-scale, scale)};
}

inline VecX random_joints(const RobotModel& m, Rng& rng) {
  VecX q(m.num_joints());
  for (int j = 0; j < m.num_joints(); ++j) q[j] = rng.uniform(m.joints[j].lower, m.joints[j].upper);
  return q;
}

inline SimState random_state(const RobotModel& m, Rng& rng, double vel_scale = 1.0) {
  SimState s = make_state(m);
  if (!m.fixed_base) {
    s.base_position = random_vec3(rng) + Vec3(0, 0, 1.5);
    s.base_orientation = random_quat(rng);
    s.base_linear_velocity = random_vec3(rng, vel_scale);
    s.base_angular_velocity = random_vec3(rng, vel_scale);
  }
  s.q = random_joints(m, rng);
  for (int j = 0; j < m.num_joints(); ++j) s.qd[j] = rng.uniform(-vel_scale, vel_scale);
  return s;
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("symmimic_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace symmimic::testing
