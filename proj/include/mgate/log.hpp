#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace mgate {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// Verbosity is controlled by the MGATE_LOG environment variable
// (error | info | debug); unset or unrecognised values mean "info".
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("MGATE_LOG");
    if (env != nullptr) {
      if (std::strcmp(env, "error") == 0) return LogLevel::Error;
      if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    }
    return LogLevel::Info;
  }();
  return level;
}

inline void log_line(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = level == LogLevel::Error   ? "error"
                    : level == LogLevel::Debug ? "debug"
                                               : "info";
  std::fprintf(stderr, "mgate: [%s] %s\n", tag, msg.c_str());
}

inline void log_error(const std::string& msg) { log_line(LogLevel::Error, msg); }
inline void log_info(const std::string& msg) { log_line(LogLevel::Info, msg); }
inline void log_debug(const std::string& msg) { log_line(LogLevel::Debug, msg); }

}  // namespace mgate
