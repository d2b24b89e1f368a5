// SPDX-License-Identifier: Apache-2.0
//
// Minimal stderr logger. The NMF_LOG environment variable picks the
// level: "quiet", "info" (default) or "debug".

#pragma once

#include <string>

namespace nmf {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level();

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace nmf
