// src/logging.hpp

// Copyright 2026 dirsep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIRSEP_LOGGING_HPP
#define DIRSEP_LOGGING_HPP

#include <string>

namespace dirsep {

// Log level comes from the DIRSEP_LOG environment variable
// (error|warn|info|debug), read once per process. Default: warn.
enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level();
void log(LogLevel level, const std::string& message);

inline void log_error(const std::string& m) { log(LogLevel::kError, m); }
inline void log_warn(const std::string& m) { log(LogLevel::kWarn, m); }
inline void log_info(const std::string& m) { log(LogLevel::kInfo, m); }
inline void log_debug(const std::string& m) { log(LogLevel::kDebug, m); }

}  // namespace dirsep

#endif  // DIRSEP_LOGGING_HPP
