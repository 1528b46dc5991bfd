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

#include <irsplan/log.hpp>

#include <iostream>
#include <mutex>

namespace irsplan {

namespace {

std::mutex& sink_mutex()
{
  static std::mutex m;
  return m;
}

LogSink& current_sink()
{
  static LogSink sink = [](LogLevel level, const std::string& msg)
    {
      if (level < LogLevel::Warning)
        return;
      std::cerr << (level == LogLevel::Warning ? "[warn] " : "[error] ")
                << msg << '\n';
    };
  return sink;
}

} // namespace

LogSink set_log_sink(LogSink sink)
{
  std::lock_guard<std::mutex> lock(sink_mutex());
  LogSink previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

void log(LogLevel level, const std::string& message)
{
  std::lock_guard<std::mutex> lock(sink_mutex());
  if (current_sink())
    current_sink()(level, message);
}

} // namespace irsplan
