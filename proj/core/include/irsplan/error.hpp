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

#ifndef IRSPLAN__ERROR_HPP
#define IRSPLAN__ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace irsplan {

enum class ErrorKind
{
  InvalidTrajectory,
  InvalidObstacle,
  InvalidScenario,
  Domain,
  Config,
  Parse,
  UnsupportedVersion,
  DegenerateChannel,
  FitFailure,
  Assembly,
  InfeasibleEndpoint,
  GraphInfeasible,
  Numerical,
  Io
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return _kind; }

private:
  ErrorKind _kind;
};

} // namespace irsplan

#endif // IRSPLAN__ERROR_HPP
