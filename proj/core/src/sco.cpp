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


#include <irsplan/sco.hpp>

#include <irsplan/log.hpp>
#include <irsplan/textio.hpp>

#include <chrono>

namespace irsplan {

ScoError::ScoError(ErrorKind kind, const std::string& what, ScoTrace trace)
: Error(kind, what),
  _trace(std::move(trace))
{
}

std::string_view to_string(PlanStatus status)
{
  switch (status)
  {
    case PlanStatus::Converged: return "converged";
    case PlanStatus::IterationLimit: return "iteration-limit";
    case PlanStatus::Stalled: return "stalled";
    case PlanStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

ScoTrace run_sco(
  const Scenario& s,
  const SnrModel& model,
  const Trajectory& initial,
  const ScoConfig& config,
  const SolverSettings& solver)
{
  config.validate();
  using clock = std::chrono::steady_clock;

  ScoTrace trace;
  {
    const AuditReport a = audit_trajectory(initial, s, model);
    if (!a.passed)
      throw ScoError(ErrorKind::InfeasibleEndpoint,
          "initial trajectory is infeasible: " + a.failures.front(), trace);
    ScoIteration it0;
    it0.trajectory = initial;
    it0.energy = motion_energy(initial, s);
    it0.status = "initial";
    it0.max_violation = a.max_violation;
    trace.iterations.push_back(std::move(it0));
  }

  for (int j = 1; j <= config.n_it_max; ++j)
  {
    const auto t0 = clock::now();
    const ScoIteration& prev = trace.last();
    const Trajectory& q_prev = prev.trajectory;
    const std::vector<LosClass> classes = slot_classes(q_prev, s);
    const RateLinearization lin = linearize_rate(model, classes, q_prev, s);
    const auto cuts = linearize_obstacles(q_prev, s.obstacles);

    double radius = config.trust_radius;
    ScoIteration next;
    next.iteration = j;
    bool accepted = false;
    bool numerical_only = true;
    std::string last_reason;

    for (int attempt = 0; attempt <= config.max_retries; ++attempt)
    {
      const P4Problem p4 = assemble_p4(s, lin, cuts, q_prev, radius);
      const SubproblemSolution sol = solve_p4(p4, s, solver);
      next.solver_iterations += sol.iterations;
      next.residuals = sol.residuals;
      next.trust_radius = radius;
      next.retries = attempt;

      if (sol.status == SolveStatus::Optimal)
      {
        const AuditReport a = audit_trajectory(sol.trajectory, s, model);
        if (a.passed)
        {
          next.trajectory = sol.trajectory;
          next.energy = sol.objective;
          next.max_violation = a.max_violation;
          next.status = attempt == 0 ? "optimal" : "shrunk";
          accepted = true;
          break;
        }
        numerical_only = false;
        last_reason = "audit: " + a.failures.front();
      }
      else
      {
        if (sol.status == SolveStatus::Infeasible)
          numerical_only = false;
        last_reason = std::string("subproblem ") + std::string(to_string(sol.status));
      }
      const double smaller = radius / 2.0;
      if (smaller < config.min_trust_radius)
        break;
      radius = smaller;
    }
    next.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();

    if (!accepted && numerical_only)
    {
      throw ScoError(ErrorKind::Numerical,
          "iteration " + std::to_string(j) + ": " + last_reason, trace);
    }
    if (!accepted)
    {
      log(LogLevel::Warning, "SCO iteration " + std::to_string(j)
        + " found no acceptable step (" + last_reason + "); keeping the incumbent");
      next.trajectory = q_prev;
      next.energy = prev.energy;
      next.max_violation = prev.max_violation;
      next.status = "stalled";
      next.improvement = 0.0;
      trace.iterations.push_back(std::move(next));
      return trace;
    }

    if (next.energy > prev.energy)
    {
      // No descent within solver accuracy: the incumbent is stationary.
      next.trajectory = q_prev;
      next.energy = prev.energy;
      next.max_violation = prev.max_violation;
      next.status = "no-descent";
    }
    next.improvement = (prev.energy - next.energy) / prev.energy;
    trace.iterations.push_back(std::move(next));
    if (trace.last().improvement <= config.epsilon)
    {
      trace.converged = true;
      return trace;
    }
  }
  return trace;
}

PlanResult plan(
  const Scenario& s,
  const SnrModel& model,
  const PlannerSettings& planner,
  const ScoConfig& config,
  const SolverSettings& solver)
{
  PlanResult out;
  out.init = select_initial(s, model, planner);
  if (!out.init.feasible)
  {
    out.status = PlanStatus::Infeasible;
    return out;
  }
  out.trace = run_sco(s, model, out.init.trajectory, config, solver);
  const ScoIteration& last = out.trace.last();
  out.trajectory = last.trajectory;
  out.energy = last.energy;
  out.audit = audit_trajectory(out.trajectory, s, model);
  if (last.status == "stalled")
    out.status = PlanStatus::Stalled;
  else
    out.status = out.trace.converged ? PlanStatus::Converged : PlanStatus::IterationLimit;
  return out;
}

} // namespace irsplan
