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

#include "testing.hpp"

#include <irsplan/error.hpp>
#include <irsplan/p4.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace irsplan;
using irsplan::oracle::grid_search_k2;
using irsplan::oracle::random_k2_instance;

TEST(P4, MatchesGridSearchOnSingleWaypoint)
{
  std::mt19937_64 rng(31);
  for (int t = 0; t < 6; ++t)
  {
    const auto inst = random_k2_instance(rng);
    const P4Problem p = assemble_p4(inst.scenario, inst.linearization, inst.cuts,
      inst.prev, inst.trust_radius);
    const SubproblemSolution sol = solve_p4(p, inst.scenario, SolverSettings{});
    ASSERT_EQ(sol.status, SolveStatus::Optimal) << "instance " << t;
    const auto grid = grid_search_k2(inst.scenario, inst.linearization, inst.cuts,
      inst.prev, inst.trust_radius, 0.01);
    ASSERT_TRUE(grid.feasible);
    const double tol = std::max(0.01 * grid.energy, grid.resolution_bound);
    EXPECT_NEAR(sol.objective, grid.energy, tol) << "instance " << t;
  }
}

TEST(P4, SolutionSatisfiesConstraints)
{
  std::mt19937_64 rng(8);
  for (int t = 0; t < 6; ++t)
  {
    const auto inst = random_k2_instance(rng);
    const Scenario& s = inst.scenario;
    const P4Problem p = assemble_p4(s, inst.linearization, inst.cuts, inst.prev, 1.0);
    const SubproblemSolution sol = solve_p4(p, s, SolverSettings{});
    ASSERT_EQ(sol.status, SolveStatus::Optimal);
    const Trajectory& q = sol.trajectory;
    EXPECT_EQ(q.front(), s.q_s);
    EXPECT_EQ(q.back(), s.q_d);
    EXPECT_LE((q[1] - q[0]).norm(), s.d_max() + 1e-6);
    EXPECT_LE((q[2] - q[1]).norm(), s.d_max() + 1e-6);
    EXPECT_LE((q[1] - inst.prev[1]).norm(), 1.0 + 1e-6);
    for (const auto& c : inst.cuts)
      EXPECT_GE(c.at(q[1]), s.d_s - 1e-6);
    EXPECT_GE(inst.linearization.average(q, s), s.r_min * (1.0 - 1e-6));
    EXPECT_NEAR(sol.objective, motion_energy(q, s), 1e-9);
  }
}

TEST(P4, ZeroTrustRadiusPinsWaypoints)
{
  std::mt19937_64 rng(2);
  const auto inst = random_k2_instance(rng);
  const P4Problem p = assemble_p4(inst.scenario, inst.linearization, inst.cuts, inst.prev, 0.0);
  const SubproblemSolution sol = solve_p4(p, inst.scenario, SolverSettings{});
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_LT((sol.trajectory[1] - inst.prev[1]).norm(), 1e-6);
}

TEST(P4, LayoutCountsVariables)
{
  std::mt19937_64 rng(4);
  const auto inst = random_k2_instance(rng);
  const P4Problem p = assemble_p4(inst.scenario, inst.linearization, inst.cuts, inst.prev, 1.0);
  const P4Layout& l = p.layout;
  EXPECT_EQ(l.K, 2);
  EXPECT_EQ(l.q(2, 1), 5);
  EXPECT_EQ(l.t(1), 6);
  EXPECT_EQ(l.u(1), 8);
  EXPECT_EQ(p.conic.num_vars(), l.n);
  EXPECT_TRUE(p.has_rate_constraint);
  EXPECT_NO_THROW(p.conic.validate());
}

TEST(P4, RejectsMismatchedInputs)
{
  std::mt19937_64 rng(4);
  const auto inst = random_k2_instance(rng);
  Trajectory shorter(inst.prev.begin(), inst.prev.end() - 1);
  EXPECT_THROW(assemble_p4(inst.scenario, inst.linearization, inst.cuts, shorter, 1.0), Error);
  EXPECT_THROW(assemble_p4(inst.scenario, inst.linearization, inst.cuts, inst.prev, -1.0), Error);
}

TEST(P4, ObstacleTangentMatchesQuadratic)
{
  const Obstacle o = Obstacle::ellipse({3.0, 4.0}, 5.0, 2.0, 1.0, 0.4);
  const Trajectory prev{{0.0, 0.0}, {1.0, 1.5}, {0.5, 7.0}, {2.0, 2.0}};
  const auto cuts = linearize_obstacles(prev, {o});
  ASSERT_EQ(cuts.size(), 2u);
  for (const auto& c : cuts)
  {
    EXPECT_GE(c.k, 1u);
    EXPECT_LE(c.k, 2u);
    EXPECT_NEAR(c.value, obstacle_margin(prev[c.k], o), 1e-12);
    const double h = 1e-6;
    for (int axis = 0; axis < 2; ++axis)
    {
      Position p = prev[c.k];
      Position m = prev[c.k];
      p[axis] += h;
      m[axis] -= h;
      const double fd = (obstacle_margin(p, o) - obstacle_margin(m, o)) / (2 * h);
      EXPECT_NEAR(c.gradient[axis], fd, 1e-6);
    }
    // convex quadratic: the tangent never exceeds it
    for (double dx : {-3.0, 0.0, 2.0})
      for (double dy : {-1.0, 4.0})
      {
        const Position q = prev[c.k] + Position(dx, dy);
        EXPECT_LE(c.at(q), obstacle_margin(q, o) + 1e-9);
      }
  }
}
