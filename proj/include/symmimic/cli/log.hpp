#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

#include "symmimic/core/error.hpp"

// Progress and diagnostics go to stderr; stdout is reserved for command output.

namespace symmimic {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

inline LogLevel log_level_from_string(const std::string& s) {
  if (s == "error") return LogLevel::kError;
  if (s == "warn") return LogLevel::kWarn;
  if (s == "info") return LogLevel::kInfo;
  if (s == "debug") return LogLevel::kDebug;
  throw ConfigError("log level must be error, warn, info or debug (got '" + s + "')");
}

inline LogLevel& log_threshold() {
  static LogLevel level = LogLevel::kInfo;
  return level;
}

/// Level from SYMMIMIC_LOG_LEVEL, or "info".
inline std::string env_log_level() {
  const char* v = std::getenv("SYMMIMIC_LOG_LEVEL");
  return v && *v ? std::string(v) : std::string("info");
}

inline void log_message(LogLevel level, const std::string& msg) {
  if (level > log_threshold()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

inline void log_info(const std::string& msg) { log_message(LogLevel::kInfo, msg); }
inline void log_warn(const std::string& msg) { log_message(LogLevel::kWarn, msg); }
inline void log_debug(const std::string& msg) { log_message(LogLevel::kDebug, msg); }

}  // namespace symmimic
