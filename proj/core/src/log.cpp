// SPDX-License-Identifier: Apache-2.0

#include "nmf/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace nmf {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("NMF_LOG");
    if (env == nullptr) return LogLevel::info;
    if (std::strcmp(env, "quiet") == 0) return LogLevel::quiet;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    return LogLevel::info;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info)
    std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug)
    std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

}  // namespace nmf
