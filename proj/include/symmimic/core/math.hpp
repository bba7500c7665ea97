#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace symmimic {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kPi = std::numbers::pi;

/// Rigid transform (rotation + translation) in world coordinates.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Vec3 apply(const Vec3& local) const { return position + orientation * local; }
};

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

inline Quat quat_wxyz(double w, double x, double y, double z) { return Quat(w, x, y, z); }

/// Rotation by angle `angle` about unit axis.
inline Quat axis_angle(const Vec3& axis, double angle) {
  return Quat(Eigen::AngleAxisd(angle, axis));
}

/// Exponential map of a rotation vector.
inline Quat quat_exp(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-12) {
    Quat q(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
    q.normalize();
    return q;
  }
  return Quat(Eigen::AngleAxisd(angle, rotvec / angle));
}

/// Rotation vector of a unit quaternion (inverse of quat_exp), shortest arc.
inline Vec3 quat_log(const Quat& q_in) {
  Quat q = q_in.w() < 0.0 ? Quat(-q_in.w(), -q_in.x(), -q_in.y(), -q_in.z()) : q_in;
  const double s = q.vec().norm();
  if (s < 1e-12) return 2.0 * q.vec();
  return 2.0 * std::atan2(s, q.w()) * q.vec() / s;
}

/// Heading (yaw about world z) of an orientation, measured from the body x axis.
inline double yaw_of(const Quat& q) {
  const Mat3 r = q.toRotationMatrix();
  return std::atan2(r(1, 0), r(0, 0));
}

inline Quat yaw_quat(double yaw) { return axis_angle(Vec3::UnitZ(), yaw); }

/// Unit gravity direction expressed in the frame of `orientation`.
inline Vec3 projected_gravity(const Quat& orientation) {
  return orientation.conjugate() * Vec3(0.0, 0.0, -1.0);
}

/// Geodesic angle between two orientations: 2 asin(min(1, |vec(a^-1 b)|)).
inline double quat_distance(const Quat& a, const Quat& b) {
  const Quat d = a.conjugate() * b;
  return 2.0 * std::asin(std::min(1.0, d.vec().norm()));
}

// Reflection across the sagittal (x-z) plane. Polar vectors flip y, axial
// vectors (angular velocity, rotation axes) flip x and z, and rotations are
// conjugated by diag(1,-1,1).
inline Vec3 mirror_vector(const Vec3& v) { return {v.x(), -v.y(), v.z()}; }
inline Vec3 mirror_axial(const Vec3& v) { return {-v.x(), v.y(), -v.z()}; }
inline Quat mirror_quat(const Quat& q) { return Quat(q.w(), -q.x(), q.y(), -q.z()); }

inline bool all_finite(const Eigen::Ref<const VecX>& v) { return v.allFinite(); }

inline double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace symmimic
