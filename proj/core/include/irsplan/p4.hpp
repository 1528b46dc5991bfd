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


#ifndef IRSPLAN__P4_HPP
#define IRSPLAN__P4_HPP

#include <irsplan/conic.hpp>
#include <irsplan/scenario.hpp>
#include <irsplan/snrmodel.hpp>
#include <irsplan/socp.hpp>

#include <span>
#include <vector>

namespace irsplan {

/// Tangent of the obstacle quadratic f(q) = (q - c)^T P^{-1} (q - c) at the
/// anchor of slot k:  f(anchor) + gradient^T (q - anchor).
struct ObstacleLinearization
{
  std::size_t k = 0;
  std::size_t obstacle = 0;
  Position anchor;
  double value = 0.0;
  Eigen::Vector2d gradient;

  double at(const Position& q) const { return value + gradient.dot(q - anchor); }
};

/// One tangent per interior waypoint (k = 1 .. K-1) and obstacle.
std::vector<ObstacleLinearization> linearize_obstacles(
  std::span<const Position> prev_traj,
  const std::vector<Obstacle>& obstacles);

/// Column indices of the P4 variables inside the conic problem.
struct P4Layout
{
  int K = 0;
  Eigen::Index n = 0;
  std::vector<Eigen::Index> s_a; ///< per slot, -1 when the slot has no AP term
  std::vector<Eigen::Index> s_i; ///< per slot, -1 when the slot has no IRS term

  Eigen::Index q(int k, int axis) const { return 2 * k + axis; }
  Eigen::Index t(int k) const { return 2 * (K + 1) + (k - 1); }
  Eigen::Index u(int k) const { return 2 * (K + 1) + K + (k - 1); }
};

struct P4Problem
{
  ConicProblem conic;
  P4Layout layout;
  bool has_rate_constraint = false;
};

/// The convex subproblem around prev_traj: motion energy with epigraphs for
/// the step norms and squared norms, step bound, endpoints, trust region,
/// linearized obstacles and the linearized average-rate constraint.
/// A zero trust radius pins every waypoint to prev_traj.
P4Problem assemble_p4(
  const Scenario& scenario,
  const RateLinearization& linearization,
  std::span<const ObstacleLinearization> obstacle_cuts,
  std::span<const Position> prev_traj,
  double trust_radius);

struct SubproblemSolution
{
  Trajectory trajectory;
  double objective = 0.0; ///< motion energy of `trajectory` [J]
  double conic_objective = 0.0;
  SolveStatus status = SolveStatus::MaxIterations;
  Residuals residuals;
  int iterations = 0;
};

/// Solves the conic form and extracts the waypoints. Endpoints are snapped
/// to q_s and q_d exactly.
SubproblemSolution solve_p4(
  const P4Problem& problem,
  const Scenario& scenario,
  const SolverSettings& settings);

} // namespace irsplan

#endif // IRSPLAN__P4_HPP
