// Copyright 2026 The fhctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string_view>

namespace fhctl {

enum class LogLevel { kDebug, kInfo, kWarn, kError, kOff };

/// Messages below the threshold are discarded. Default: kWarn.
void set_log_level(LogLevel level);
LogLevel log_level();

/// Writes one line to stderr: `<level> <message>`. Thread-safe.
void log_message(LogLevel level, std::string_view message);

inline void log_info(std::string_view message) { log_message(LogLevel::kInfo, message); }
inline void log_warn(std::string_view message) { log_message(LogLevel::kWarn, message); }
inline void log_error(std::string_view message) { log_message(LogLevel::kError, message); }

}  // namespace fhctl
