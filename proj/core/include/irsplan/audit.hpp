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


#ifndef IRSPLAN__AUDIT_HPP
#define IRSPLAN__AUDIT_HPP

#include <irsplan/scenario.hpp>
#include <irsplan/snrmodel.hpp>

#include <span>
#include <string>
#include <vector>

namespace irsplan {

struct AuditTolerances
{
  double step = 1e-6;          ///< meters above D_max
  double obstacle = 1e-6;      ///< below d_s
  double rate_relative = 1e-6; ///< relative shortfall below r_min
};

struct AuditReport
{
  bool passed = false;
  bool endpoints_exact = false;
  double max_step = 0.0;
  double min_margin = 0.0;
  double average_rate = 0.0;

  /// Largest violation over all constraints, each in its own unit
  /// (meters, margin units, relative rate); 0 when everything holds exactly.
  double max_violation = 0.0;
  std::vector<std::string> failures;
};

/// Checks every constraint of the original trajectory problem: slot count,
/// exact endpoints, step lengths, obstacle quadratics and the average rate
/// under the fitted model. Shares no evaluation code with the planner.
AuditReport audit_trajectory(
  std::span<const Position> traj,
  const Scenario& scenario,
  const SnrModel& model,
  const AuditTolerances& tol = {});

} // namespace irsplan

#endif // IRSPLAN__AUDIT_HPP
