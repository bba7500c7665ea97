#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "symmimic/core/error.hpp"
#include "symmimic/core/math.hpp"

namespace symmimic {

using Json = nlohmann::json;
// Key order preserved on output so emitted documents read in schema order.
using OrderedJson = nlohmann::ordered_json;

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

template <class J>
void write_json_file(const std::filesystem::path& path, const J& j) {
  write_text_file(path, j.dump(2) + "\n");
}

/// Rejects keys of `j` not listed in `allowed`.
template <class J>
void check_keys(const J& j, std::initializer_list<const char*> allowed, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* k) { return it.key() == k; });
    if (!ok) throw ConfigError(context + ": unknown key '" + it.key() + "'");
  }
}

/// Assigns j[key] to out when present.
template <class J, class T>
void read_opt(const J& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).template get<T>();
}

inline Json vec_to_json(const Eigen::Ref<const VecX>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline VecX vec_from_json(const Json& j) {
  VecX v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

inline Json vec3_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const Json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) throw ParseError(context + ": expected 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline Json quat_to_json(const Quat& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

inline Quat quat_from_json(const Json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 4) throw ParseError(context + ": expected quaternion [w,x,y,z]");
  return Quat(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

/// 64-bit FNV-1a, used for stable content hashes in reports.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace symmimic
