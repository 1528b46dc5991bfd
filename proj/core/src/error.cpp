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

#include <irsplan/error.hpp>

namespace irsplan {

std::string_view to_string(ErrorKind kind)
{
  switch (kind)
  {
    case ErrorKind::InvalidTrajectory: return "invalid-trajectory";
    case ErrorKind::InvalidObstacle: return "invalid-obstacle";
    case ErrorKind::InvalidScenario: return "invalid-scenario";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Config: return "config";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::UnsupportedVersion: return "unsupported-version";
    case ErrorKind::DegenerateChannel: return "degenerate-channel";
    case ErrorKind::FitFailure: return "fit-failure";
    case ErrorKind::Assembly: return "assembly";
    case ErrorKind::InfeasibleEndpoint: return "infeasible-endpoint";
    case ErrorKind::GraphInfeasible: return "graph-infeasible";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
: std::runtime_error(std::string(to_string(kind)) + ": " + what),
  _kind(kind)
{
}

} // namespace irsplan
