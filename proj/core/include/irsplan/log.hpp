/*
 * Copyright (C) 2026 The irsplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/

#ifndef IRSPLAN__LOG_HPP
#define IRSPLAN__LOG_HPP

#include <functional>
#include <string>

namespace irsplan {

enum class LogLevel
{
  Debug,
  Info,
  Warning,
  Error
};

using LogSink = std::function<void(LogLevel, const std::string&)>;

/// Replaces the process-wide sink (stderr, warnings and above, by default).
/// Returns the previous sink.
LogSink set_log_sink(LogSink sink);

void log(LogLevel level, const std::string& message);

} // namespace irsplan

#endif // IRSPLAN__LOG_HPP
