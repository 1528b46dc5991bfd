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


#ifndef IRSPLAN__SCO_HPP
#define IRSPLAN__SCO_HPP

#include <irsplan/audit.hpp>
#include <irsplan/config.hpp>
#include <irsplan/error.hpp>
#include <irsplan/p4.hpp>
#include <irsplan/planner.hpp>
#include <irsplan/snrmodel.hpp>

#include <string>
#include <vector>

namespace irsplan {

struct ScoIteration
{
  int iteration = 0;
  Trajectory trajectory;
  double energy = 0.0;
  double improvement = 0.0; ///< (E_{j-1} - E_j) / E_{j-1}
  std::string status;       ///< initial, optimal, shrunk, no-descent, stalled
  double max_violation = 0.0;
  double trust_radius = 0.0;
  int solver_iterations = 0;
  int retries = 0;
  Residuals residuals;
  double wall_time_s = 0.0; ///< in-memory only, never serialized
};

struct ScoTrace
{
  std::vector<ScoIteration> iterations;
  bool converged = false; ///< stopped on the relative-improvement rule

  const ScoIteration& last() const { return iterations.back(); }
};

/// Subproblem failure; carries the trace up to the failing iteration.
class ScoError : public Error
{
public:
  ScoError(ErrorKind kind, const std::string& what, ScoTrace trace);
  const ScoTrace& trace() const { return _trace; }

private:
  ScoTrace _trace;
};

/// Successive convex optimization from a feasible initial trajectory.
/// Each iterate is audited; candidates that fail the audit or the P4 solve
/// are retried with half the trust radius. Energies are non-increasing.
ScoTrace run_sco(
  const Scenario& scenario,
  const SnrModel& model,
  const Trajectory& initial,
  const ScoConfig& config,
  const SolverSettings& solver);

enum class PlanStatus
{
  Converged,
  IterationLimit,
  Stalled,
  Infeasible
};

std::string_view to_string(PlanStatus status);

struct PlanResult
{
  PlanStatus status = PlanStatus::Infeasible;
  InitialSelection init;
  ScoTrace trace;
  Trajectory trajectory;
  double energy = 0.0;
  AuditReport audit;
};

/// Initial-solution selection followed by SCO.
PlanResult plan(
  const Scenario& scenario,
  const SnrModel& model,
  const PlannerSettings& planner,
  const ScoConfig& config,
  const SolverSettings& solver);

} // namespace irsplan

#endif // IRSPLAN__SCO_HPP
