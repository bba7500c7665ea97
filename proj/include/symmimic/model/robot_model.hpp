#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/json_util.hpp"
#include "symmimic/core/math.hpp"

namespace symmimic {

enum class WeightClass { kEndEffector, kUpper, kLower };

inline std::string to_string(WeightClass c) {
  switch (c) {
    case WeightClass::kEndEffector: return "end_effector";
    case WeightClass::kUpper: return "upper";
    case WeightClass::kLower: return "lower";
  }
  return "lower";
}

inline WeightClass weight_class_from_string(const std::string& s) {
  if (s == "end_effector") return WeightClass::kEndEffector;
  if (s == "upper") return WeightClass::kUpper;
  if (s == "lower") return WeightClass::kLower;
  throw ParseError("unknown weight class '" + s + "'");
}

struct LinkSpec {
  std::string name;
  double mass = 1.0;                      // kg
  Mat3 inertia = Mat3::Identity() * 0.01;  // about the COM, link frame, kg m^2
  Vec3 com = Vec3::Zero();                 // in the link (joint) frame, m
};

/// Revolute joint. Link frames coincide with their parent frame (translated by
/// `origin`) when the joint angle is zero.
struct JointSpec {
  std::string name;
  int parent = 0;
  int child = 1;
  Vec3 origin = Vec3::Zero();  // child frame origin in the parent frame, m
  Vec3 axis = Vec3::UnitY();   // unit axis, parent frame
  double lower = -1.0;
  double upper = 1.0;
  double default_angle = 0.0;
  WeightClass weight_class = WeightClass::kLower;
  double kp = 50.0;            // N m / rad
  double kd = 1.0;             // N m s / rad
  double torque_limit = 50.0;  // N m
  double armature = 0.0;       // reflected rotor inertia, kg m^2
};

struct KeypointSpec {
  std::string name;
  int link = 0;
  Vec3 offset = Vec3::Zero();
  WeightClass weight_class = WeightClass::kLower;
};

struct ContactSphere {
  int link = 0;
  Vec3 offset = Vec3::Zero();
  double radius = 0.02;
};

/// Bilateral mirror. v'[i] = joint_sign[i] * v[joint_perm[i]]; keypoints and
/// links are permuted, base quantities are reflected across the x-z plane.
struct SymmetryMap {
  std::vector<int> joint_perm;
  std::vector<double> joint_sign;
  std::vector<int> keypoint_perm;
  // Derived from the above and the geometry.
  std::vector<int> link_perm;
  std::vector<int> sphere_perm;
  std::vector<int> foot_perm;
};

struct RobotModel {
  std::string name;
  bool fixed_base = false;
  std::vector<LinkSpec> links;
  std::vector<JointSpec> joints;
  std::vector<KeypointSpec> keypoints;
  std::vector<ContactSphere> contact_spheres;
  std::vector<int> feet;  // link indices
  SymmetryMap symmetry;

  int num_joints() const { return static_cast<int>(joints.size()); }
  int num_links() const { return static_cast<int>(links.size()); }
  int num_keypoints() const { return static_cast<int>(keypoints.size()); }
  int num_dofs() const { return (fixed_base ? 0 : 6) + num_joints(); }
  int base_dofs() const { return fixed_base ? 0 : 6; }

  VecX default_pose() const {
    VecX q(num_joints());
    for (int i = 0; i < num_joints(); ++i) q[i] = joints[i].default_angle;
    return q;
  }
  VecX lower_limits() const {
    VecX v(num_joints());
    for (int i = 0; i < num_joints(); ++i) v[i] = joints[i].lower;
    return v;
  }
  VecX upper_limits() const {
    VecX v(num_joints());
    for (int i = 0; i < num_joints(); ++i) v[i] = joints[i].upper;
    return v;
  }
  double total_mass() const {
    double m = 0.0;
    for (const auto& l : links) m += l.mass;
    return m;
  }
  /// Joint whose child is `link`, or -1 for the root.
  int joint_of_link(int link) const {
    for (int j = 0; j < num_joints(); ++j)
      if (joints[j].child == link) return j;
    return -1;
  }
  int find_link(const std::string& n) const {
    for (int i = 0; i < num_links(); ++i)
      if (links[i].name == n) return i;
    return -1;
  }
  int find_joint(const std::string& n) const {
    for (int i = 0; i < num_joints(); ++i)
      if (joints[i].name == n) return i;
    return -1;
  }
  int find_keypoint(const std::string& n) const {
    for (int i = 0; i < num_keypoints(); ++i)
      if (keypoints[i].name == n) return i;
    return -1;
  }
  /// Contact spheres attached to `link`.
  std::vector<int> spheres_of_link(int link) const {
    std::vector<int> out;
    for (int s = 0; s < static_cast<int>(contact_spheres.size()); ++s)
      if (contact_spheres[s].link == link) out.push_back(s);
    return out;
  }
};

using ModelPtr = std::shared_ptr<const RobotModel>;

namespace detail {

inline bool is_permutation(const std::vector<int>& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (int v : p) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

inline bool is_involution(const std::vector<int>& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[p[i]] != static_cast<int>(i)) return false;
  return true;
}

inline bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace detail

/// Fills the derived parts of the symmetry map (link, sphere and foot
/// permutations). Throws ValidationError when the geometry has no mirror match.
inline void derive_symmetry(RobotModel& m) {
  auto& s = m.symmetry;
  s.link_perm.assign(m.num_links(), 0);
  for (int j = 0; j < m.num_joints(); ++j) s.link_perm[m.joints[j].child] = m.joints[s.joint_perm[j]].child;
  s.link_perm[0] = 0;

  const int ns = static_cast<int>(m.contact_spheres.size());
  s.sphere_perm.assign(ns, -1);
  for (int a = 0; a < ns; ++a) {
    const auto& sa = m.contact_spheres[a];
    for (int b = 0; b < ns; ++b) {
      const auto& sb = m.contact_spheres[b];
      if (sb.link == s.link_perm[sa.link] && (sb.offset - mirror_vector(sa.offset)).norm() < 1e-9 &&
          std::abs(sb.radius - sa.radius) < 1e-12) {
        s.sphere_perm[a] = b;
        break;
      }
    }
    if (s.sphere_perm[a] < 0) throw ValidationError("contact sphere " + std::to_string(a) + " has no mirror counterpart");
  }

  s.foot_perm.assign(m.feet.size(), -1);
  for (std::size_t a = 0; a < m.feet.size(); ++a)
    for (std::size_t b = 0; b < m.feet.size(); ++b)
      if (m.feet[b] == s.link_perm[m.feet[a]]) s.foot_perm[a] = static_cast<int>(b);
  for (int f : s.foot_perm)
    if (f < 0) throw ValidationError("feet are not mirror symmetric");
}

/// Checks every model invariant; throws ValidationError naming the first violation.
inline void validate(const RobotModel& m) {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (m.links.empty()) fail("model has no links");
  for (const auto& l : m.links) {
    if (!(l.mass > 0.0)) fail("link '" + l.name + "': mass must be positive");
    if ((l.inertia - l.inertia.transpose()).norm() > 1e-12) fail("link '" + l.name + "': inertia not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(l.inertia);
    if (es.eigenvalues().minCoeff() <= 0.0) fail("link '" + l.name + "': inertia not positive definite");
  }
  std::vector<int> parent_joint(m.num_links(), -1);
  for (int j = 0; j < m.num_joints(); ++j) {
    const auto& jt = m.joints[j];
    const std::string tag = "joint '" + jt.name + "'";
    if (jt.child <= 0 || jt.child >= m.num_links()) fail(tag + ": invalid child link");
    if (jt.parent < 0 || jt.parent >= m.num_links()) fail(tag + ": invalid parent link");
    if (parent_joint[jt.child] >= 0) fail(tag + ": link has two parent joints");
    parent_joint[jt.child] = j;
    if (jt.parent != 0 && (parent_joint[jt.parent] < 0 || parent_joint[jt.parent] >= j))
      fail(tag + ": parent link does not appear earlier in topological order");
    if (std::abs(jt.axis.norm() - 1.0) > 1e-9) fail(tag + ": axis is not a unit vector");
    if (!(jt.lower < jt.upper)) fail(tag + ": lower limit >= upper limit");
    if (!(jt.default_angle > jt.lower && jt.default_angle < jt.upper)) fail(tag + ": default pose outside limits");
    if (!(jt.kp > 0.0) || jt.kd < 0.0) fail(tag + ": gains must satisfy kp > 0, kd >= 0");
    if (!(jt.torque_limit > 0.0)) fail(tag + ": torque limit must be positive");
    if (jt.armature < 0.0) fail(tag + ": armature must be non-negative");
  }
  for (int l = 1; l < m.num_links(); ++l)
    if (parent_joint[l] < 0) fail("link '" + m.links[l].name + "' is not attached by a joint");

  for (const auto& k : m.keypoints)
    if (k.link < 0 || k.link >= m.num_links()) fail("keypoint '" + k.name + "': invalid link");
  for (const auto& s : m.contact_spheres) {
    if (s.link < 0 || s.link >= m.num_links()) fail("contact sphere: invalid link");
    if (!(s.radius > 0.0)) fail("contact sphere: radius must be positive");
  }
  for (int f : m.feet)
    if (f < 0 || f >= m.num_links()) fail("feet: invalid link");

  if (!m.fixed_base) {
    for (const char* req : {"head", "left_hand", "right_hand", "left_foot", "right_foot", "pelvis"})
      if (m.find_keypoint(req) < 0) fail(std::string("missing required keypoint '") + req + "'");
  }

  const auto& s = m.symmetry;
  if (!detail::is_permutation(s.joint_perm, m.num_joints())) fail("symmetry joint_perm is not a permutation");
  if (!detail::is_permutation(s.keypoint_perm, m.num_keypoints())) fail("symmetry keypoint_perm is not a permutation");
  if (!detail::is_involution(s.joint_perm) || !detail::is_involution(s.keypoint_perm)) fail("symmetry map not involutive");
  if (static_cast<int>(s.joint_sign.size()) != m.num_joints()) fail("symmetry joint_sign has wrong length");
  for (int j = 0; j < m.num_joints(); ++j) {
    if (s.joint_sign[j] != 1.0 && s.joint_sign[j] != -1.0) fail("symmetry joint_sign must be +1 or -1");
    if (s.joint_sign[j] != s.joint_sign[s.joint_perm[j]]) fail("symmetry map not involutive");
  }
  for (int k = 0; k < m.num_keypoints(); ++k) {
    const auto& name = m.keypoints[k].name;
    if (detail::starts_with(name, "left_")) {
      const std::string want = "right_" + name.substr(5);
      if (m.keypoints[s.keypoint_perm[k]].name != want) fail("symmetry keypoint '" + name + "' does not map to '" + want + "'");
    }
  }
  if (!detail::is_permutation(s.link_perm, m.num_links()) || !detail::is_involution(s.link_perm))
    fail("symmetry link permutation is not an involution");
}

/// Geometric check that the symmetry map is an exact mirror of the model
/// (joint origins, axes, limits, defaults, inertial data, keypoint offsets).
/// Returns an empty string when symmetric, otherwise a description.
inline std::string symmetry_defect(const RobotModel& m, double tol = 1e-12) {
  const auto& s = m.symmetry;
  for (int j = 0; j < m.num_joints(); ++j) {
    const auto& a = m.joints[j];
    const auto& b = m.joints[s.joint_perm[j]];
    const double sg = s.joint_sign[j];
    if ((mirror_vector(a.origin) - b.origin).norm() > tol) return "joint '" + a.name + "': origin";
    if ((mirror_axial(a.axis) - sg * b.axis).norm() > tol) return "joint '" + a.name + "': axis/sign";
    const double lo = sg > 0 ? a.lower : -a.upper;
    const double hi = sg > 0 ? a.upper : -a.lower;
    if (std::abs(lo - b.lower) > tol || std::abs(hi - b.upper) > tol) return "joint '" + a.name + "': limits";
    if (std::abs(sg * a.default_angle - b.default_angle) > tol) return "joint '" + a.name + "': default";
    if (a.kp != b.kp || a.kd != b.kd || a.torque_limit != b.torque_limit || a.armature != b.armature)
      return "joint '" + a.name + "': actuation";
    if (a.weight_class != b.weight_class) return "joint '" + a.name + "': weight class";
  }
  const Mat3 mir = Eigen::Vector3d(1.0, -1.0, 1.0).asDiagonal();
  for (int l = 0; l < m.num_links(); ++l) {
    const auto& a = m.links[l];
    const auto& b = m.links[s.link_perm[l]];
    if (a.mass != b.mass) return "link '" + a.name + "': mass";
    if ((mirror_vector(a.com) - b.com).norm() > tol) return "link '" + a.name + "': com";
    if ((mir * a.inertia * mir - b.inertia).norm() > tol) return "link '" + a.name + "': inertia";
  }
  for (int k = 0; k < m.num_keypoints(); ++k) {
    const auto& a = m.keypoints[k];
    const auto& b = m.keypoints[s.keypoint_perm[k]];
    if (b.link != s.link_perm[a.link] || (mirror_vector(a.offset) - b.offset).norm() > tol ||
        a.weight_class != b.weight_class)
      return "keypoint '" + a.name + "'";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Built-in models

namespace detail {

inline Mat3 diag3(double a, double b, double c) { return Vec3(a, b, c).asDiagonal(); }

inline void add_link(RobotModel& m, std::string name, double mass, Vec3 com, Mat3 inertia) {
  m.links.push_back({std::move(name), mass, inertia, com});
}

inline void add_joint(RobotModel& m, std::string name, int parent, int child, Vec3 origin, Vec3 axis, double lo,
                      double hi, double def, WeightClass wc, double kp, double kd, double tmax, double armature) {
  JointSpec j;
  j.name = std::move(name);
  j.parent = parent;
  j.child = child;
  j.origin = origin;
  j.axis = axis;
  j.lower = lo;
  j.upper = hi;
  j.default_angle = def;
  j.weight_class = wc;
  j.kp = kp;
  j.kd = kd;
  j.torque_limit = tmax;
  j.armature = armature;
  m.joints.push_back(j);
}

}  // namespace detail

/// 12-DoF floating-base humanoid: per leg hip-pitch/knee/ankle-pitch, per arm
/// shoulder-pitch/shoulder-roll/elbow. x forward, y left, z up.
inline RobotModel make_mini_humanoid() {
  using detail::add_joint;
  using detail::add_link;
  using detail::diag3;
  RobotModel m;
  m.name = "mini-humanoid";
  m.fixed_base = false;

  add_link(m, "pelvis", 15.0, Vec3(0, 0, 0.15), diag3(0.35, 0.30, 0.15));
  for (const char* side : {"left", "right"}) {
    const std::string s = side;
    add_link(m, s + "_thigh", 3.0, Vec3(0, 0, -0.175), diag3(0.032, 0.032, 0.004));
    add_link(m, s + "_shin", 2.0, Vec3(0, 0, -0.175), diag3(0.020, 0.020, 0.002));
    add_link(m, s + "_foot", 0.8, Vec3(0.035, 0, -0.03), diag3(0.001, 0.003, 0.003));
  }
  for (const char* side : {"left", "right"}) {
    const std::string s = side;
    add_link(m, s + "_shoulder", 0.3, Vec3(0, 0, 0), diag3(3e-4, 3e-4, 3e-4));
    add_link(m, s + "_upper_arm", 1.2, Vec3(0, 0, -0.12), diag3(0.006, 0.006, 0.001));
    add_link(m, s + "_forearm", 0.8, Vec3(0, 0, -0.11), diag3(0.0035, 0.0035, 0.0005));
  }

  const auto U = WeightClass::kUpper;
  const auto L = WeightClass::kLower;
  const double arm = 0.03;
  // Legs: links 1..6.
  for (int side = 0; side < 2; ++side) {
    const std::string s = side == 0 ? "left" : "right";
    const double y = side == 0 ? 0.09 : -0.09;
    const int base = 1 + 3 * side;
    add_joint(m, s + "_hip_pitch", 0, base, Vec3(0, y, -0.05), Vec3::UnitY(), -2.0, 1.5, -0.15, L, 400, 6.0, 120, arm);
    add_joint(m, s + "_knee", base, base + 1, Vec3(0, 0, -0.35), Vec3::UnitY(), -0.05, 2.4, 0.3, L, 600, 8.0, 150, arm);
    add_joint(m, s + "_ankle_pitch", base + 1, base + 2, Vec3(0, 0, -0.35), Vec3::UnitY(), -0.8, 0.6, -0.15, L, 150,
              3.0, 50, arm);
  }
  // Arms: links 7..12.
  for (int side = 0; side < 2; ++side) {
    const std::string s = side == 0 ? "left" : "right";
    const double y = side == 0 ? 0.17 : -0.17;
    const int base = 7 + 3 * side;
    const double rlo = side == 0 ? -0.3 : -2.5;
    const double rhi = side == 0 ? 2.5 : 0.3;
    const double rdef = side == 0 ? 0.1 : -0.1;
    add_joint(m, s + "_shoulder_pitch", 0, base, Vec3(0, y, 0.32), Vec3::UnitY(), -2.8, 1.2, 0.0, U, 100, 2.0, 25, arm);
    add_joint(m, s + "_shoulder_roll", base, base + 1, Vec3::Zero(), Vec3::UnitX(), rlo, rhi, rdef, U, 100, 2.0, 25,
              arm);
    add_joint(m, s + "_elbow", base + 1, base + 2, Vec3(0, 0, -0.25), Vec3::UnitY(), -2.4, 0.1, -0.3, U, 100, 2.0, 25,
              arm);
  }

  const auto E = WeightClass::kEndEffector;
  m.keypoints = {
      {"pelvis", 0, Vec3::Zero(), U},
      {"torso", 0, Vec3(0, 0, 0.3), U},
      {"head", 0, Vec3(0, 0, 0.55), E},
      {"left_elbow", 9, Vec3::Zero(), U},
      {"right_elbow", 12, Vec3::Zero(), U},
      {"left_hand", 9, Vec3(0, 0, -0.23), E},
      {"right_hand", 12, Vec3(0, 0, -0.23), E},
      {"left_knee", 2, Vec3::Zero(), L},
      {"right_knee", 5, Vec3::Zero(), L},
      {"left_foot", 3, Vec3(0.035, 0, -0.06), L},
      {"right_foot", 6, Vec3(0.035, 0, -0.06), L},
  };
  for (int foot : {3, 6}) {
    m.contact_spheres.push_back({foot, Vec3(-0.05, 0, -0.04), 0.02});
    m.contact_spheres.push_back({foot, Vec3(0.12, 0, -0.04), 0.02});
  }
  m.feet = {3, 6};

  m.symmetry.joint_perm = {3, 4, 5, 0, 1, 2, 9, 10, 11, 6, 7, 8};
  m.symmetry.joint_sign = {1, 1, 1, 1, 1, 1, 1, -1, 1, 1, -1, 1};
  m.symmetry.keypoint_perm = {0, 1, 2, 4, 3, 6, 5, 8, 7, 10, 9};
  derive_symmetry(m);
  validate(m);
  return m;
}

/// Fixed-base single hinge arm (pitch about y) used for small tracking tasks.
inline RobotModel make_single_joint_arm() {
  RobotModel m;
  m.name = "single-joint-arm";
  m.fixed_base = true;
  detail::add_link(m, "pelvis", 5.0, Vec3::Zero(), detail::diag3(0.05, 0.05, 0.05));
  detail::add_link(m, "arm", 1.0, Vec3(0, 0, -0.2), detail::diag3(0.0135, 0.0135, 0.0005));
  detail::add_joint(m, "shoulder", 0, 1, Vec3::Zero(), Vec3::UnitY(), -1.5, 1.5, 0.0, WeightClass::kUpper, 50, 1.0,
                    30, 0.01);
  m.keypoints = {{"pelvis", 0, Vec3::Zero(), WeightClass::kUpper},
                 {"hand", 1, Vec3(0, 0, -0.4), WeightClass::kEndEffector}};
  m.symmetry.joint_perm = {0};
  m.symmetry.joint_sign = {1};
  m.symmetry.keypoint_perm = {0, 1};
  derive_symmetry(m);
  validate(m);
  return m;
}

inline std::vector<std::string> builtin_model_names() { return {"mini-humanoid", "single-joint-arm"}; }

// ---------------------------------------------------------------------------
// JSON document

inline Json model_to_json(const RobotModel& m) {
  Json j;
  j["name"] = m.name;
  j["fixed_base"] = m.fixed_base;
  j["links"] = Json::array();
  for (const auto& l : m.links) {
    Json inertia = Json::array();
    for (int r = 0; r < 3; ++r) inertia.push_back(Json::array({l.inertia(r, 0), l.inertia(r, 1), l.inertia(r, 2)}));
    j["links"].push_back({{"name", l.name}, {"mass", l.mass}, {"inertia", inertia}, {"com", vec3_to_json(l.com)}});
  }
  j["joints"] = Json::array();
  for (const auto& jt : m.joints) {
    j["joints"].push_back({{"name", jt.name},
                           {"parent", m.links[jt.parent].name},
                           {"child", m.links[jt.child].name},
                           {"origin", vec3_to_json(jt.origin)},
                           {"axis", vec3_to_json(jt.axis)},
                           {"lower", jt.lower},
                           {"upper", jt.upper},
                           {"default", jt.default_angle},
                           {"weight_class", to_string(jt.weight_class)},
                           {"kp", jt.kp},
                           {"kd", jt.kd},
                           {"torque_limit", jt.torque_limit},
                           {"armature", jt.armature}});
  }
  j["keypoints"] = Json::array();
  for (const auto& k : m.keypoints)
    j["keypoints"].push_back({{"name", k.name},
                              {"link", m.links[k.link].name},
                              {"offset", vec3_to_json(k.offset)},
                              {"weight_class", to_string(k.weight_class)}});
  j["contact_spheres"] = Json::array();
  for (const auto& s : m.contact_spheres)
    j["contact_spheres"].push_back(
        {{"link", m.links[s.link].name}, {"offset", vec3_to_json(s.offset)}, {"radius", s.radius}});
  j["feet"] = Json::array();
  for (int f : m.feet) j["feet"].push_back(m.links[f].name);
  j["symmetry"] = {{"joint_perm", m.symmetry.joint_perm},
                   {"joint_sign", m.symmetry.joint_sign},
                   {"keypoint_perm", m.symmetry.keypoint_perm}};
  return j;
}

/// Parses and validates a model document.
inline RobotModel model_from_json(const Json& j) {
  RobotModel m;
  try {
    check_keys(j, {"name", "fixed_base", "links", "joints", "keypoints", "contact_spheres", "feet", "symmetry"},
               "model");
    m.name = j.at("name").get<std::string>();
    read_opt(j, "fixed_base", m.fixed_base);
    auto link_index = [&](const Json& v, const std::string& ctx) {
      const int i = m.find_link(v.get<std::string>());
      if (i < 0) throw ParseError(ctx + ": unknown link '" + v.get<std::string>() + "'");
      return i;
    };
    for (const auto& lj : j.at("links")) {
      check_keys(lj, {"name", "mass", "inertia", "com"}, "link");
      LinkSpec l;
      l.name = lj.at("name").get<std::string>();
      l.mass = lj.at("mass").get<double>();
      const auto& in = lj.at("inertia");
      if (in.size() != 3) throw ParseError("link '" + l.name + "': inertia must be 3x3");
      for (int r = 0; r < 3; ++r) l.inertia.row(r) = vec3_from_json(in[r], "inertia").transpose();
      if (lj.contains("com")) l.com = vec3_from_json(lj.at("com"), "com");
      m.links.push_back(l);
    }
    for (const auto& jj : j.at("joints")) {
      check_keys(jj, {"name", "parent", "child", "origin", "axis", "lower", "upper", "default", "weight_class", "kp",
                      "kd", "torque_limit", "armature"},
                 "joint");
      JointSpec jt;
      jt.name = jj.at("name").get<std::string>();
      jt.parent = link_index(jj.at("parent"), "joint '" + jt.name + "'");
      jt.child = link_index(jj.at("child"), "joint '" + jt.name + "'");
      if (jj.contains("origin")) jt.origin = vec3_from_json(jj.at("origin"), "origin");
      jt.axis = vec3_from_json(jj.at("axis"), "axis");
      jt.lower = jj.at("lower").get<double>();
      jt.upper = jj.at("upper").get<double>();
      jt.default_angle = jj.value("default", 0.0);
      if (jj.contains("weight_class")) jt.weight_class = weight_class_from_string(jj.at("weight_class"));
      read_opt(jj, "kp", jt.kp);
      read_opt(jj, "kd", jt.kd);
      read_opt(jj, "torque_limit", jt.torque_limit);
      read_opt(jj, "armature", jt.armature);
      m.joints.push_back(jt);
    }
    for (const auto& kj : j.at("keypoints")) {
      check_keys(kj, {"name", "link", "offset", "weight_class"}, "keypoint");
      KeypointSpec k;
      k.name = kj.at("name").get<std::string>();
      k.link = link_index(kj.at("link"), "keypoint '" + k.name + "'");
      if (kj.contains("offset")) k.offset = vec3_from_json(kj.at("offset"), "offset");
      k.weight_class = weight_class_from_string(kj.at("weight_class"));
      m.keypoints.push_back(k);
    }
    if (j.contains("contact_spheres"))
      for (const auto& sj : j.at("contact_spheres")) {
        check_keys(sj, {"link", "offset", "radius"}, "contact sphere");
        ContactSphere s;
        s.link = link_index(sj.at("link"), "contact sphere");
        s.offset = vec3_from_json(sj.at("offset"), "offset");
        s.radius = sj.at("radius").get<double>();
        m.contact_spheres.push_back(s);
      }
    if (j.contains("feet"))
      for (const auto& f : j.at("feet")) m.feet.push_back(link_index(f, "feet"));
    const auto& sj = j.at("symmetry");
    check_keys(sj, {"joint_perm", "joint_sign", "keypoint_perm"}, "symmetry");
    m.symmetry.joint_perm = sj.at("joint_perm").get<std::vector<int>>();
    m.symmetry.joint_sign = sj.at("joint_sign").get<std::vector<double>>();
    m.symmetry.keypoint_perm = sj.at("keypoint_perm").get<std::vector<int>>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("model document: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  }
  // Permutation sanity before deriving link/sphere maps from it.
  if (!detail::is_permutation(m.symmetry.joint_perm, m.num_joints()))
    throw ValidationError("symmetry joint_perm is not a permutation");
  if (!detail::is_involution(m.symmetry.joint_perm)) throw ValidationError("symmetry map not involutive");
  for (const auto& jt : m.joints)
    if (jt.child <= 0) throw ValidationError("joint '" + jt.name + "': invalid child link");
  derive_symmetry(m);
  validate(m);
  return m;
}

/// Loads a built-in model by name, or a model document from disk.
inline RobotModel load_model(const std::string& name_or_path) {
  if (name_or_path == "mini-humanoid") return make_mini_humanoid();
  if (name_or_path == "single-joint-arm") return make_single_joint_arm();
  if (!std::filesystem::exists(name_or_path)) throw ParseError("model not found: " + name_or_path);
  return model_from_json(read_json_file(name_or_path));
}

}  // namespace symmimic
