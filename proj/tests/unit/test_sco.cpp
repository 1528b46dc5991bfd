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

#include <irsplan/audit.hpp>
#include <irsplan/error.hpp>
#include <irsplan/sco.hpp>

#include <gtest/gtest.h>

using namespace irsplan;

namespace {

struct ScoSetup
{
  Scenario s;
  SnrModel model;
};

/// Reference geometry with a rate floor between the ME and MR candidates.
ScoSetup active_rate_setup()
{
  ScoSetup out{reference_scenario(), oracle::direct_only_model()};
  out.s.r_min = 0.0;
  const InitialSelection init = select_initial(out.s, out.model, PlannerSettings{});
  const double me = rate(out.model, init.me, out.s);
  const double mr = rate(out.model, init.mr, out.s);
  out.s.r_min = me + 0.3 * (mr - me);
  return out;
}

} // namespace

TEST(Sco, EnergyIsMonotoneAndFinalIterateFeasible)
{
  const ScoSetup st = active_rate_setup();
  const PlanResult r = plan(st.s, st.model, PlannerSettings{}, ScoConfig{}, SolverSettings{});
  ASSERT_NE(r.status, PlanStatus::Infeasible);
  const auto& its = r.trace.iterations;
  ASSERT_GE(its.size(), 2u);
  EXPECT_EQ(its.front().status, "initial");
  for (std::size_t j = 1; j < its.size(); ++j)
  {
    EXPECT_LE(its[j].energy, its[j - 1].energy);
    EXPECT_NEAR(its[j].improvement, (its[j - 1].energy - its[j].energy) / its[j - 1].energy, 1e-15);
    EXPECT_TRUE(audit_trajectory(its[j].trajectory, st.s, st.model).passed) << "iteration " << j;
  }
  EXPECT_TRUE(r.audit.passed);
  EXPECT_LT(r.energy, its.front().energy);
  EXPECT_LE(static_cast<int>(its.size()) - 1, ScoConfig{}.n_it_max);
  if (r.status == PlanStatus::Converged)
    EXPECT_LE(its.back().improvement, ScoConfig{}.epsilon);
}

TEST(Sco, RateFloorIsRespected)
{
  const ScoSetup st = active_rate_setup();
  const PlanResult r = plan(st.s, st.model, PlannerSettings{}, ScoConfig{}, SolverSettings{});
  EXPECT_GE(rate(st.model, r.trajectory, st.s), st.s.r_min * (1.0 - 1e-6));
}

TEST(Sco, TinyTrustRadiusBarelyMoves)
{
  const ScoSetup st = active_rate_setup();
  const InitialSelection init = select_initial(st.s, st.model, PlannerSettings{});
  ScoConfig cfg;
  cfg.trust_radius = 1e-4;
  cfg.min_trust_radius = 1e-5;
  cfg.n_it_max = 1;
  const ScoTrace tr = run_sco(st.s, st.model, init.trajectory, cfg, SolverSettings{});
  ASSERT_EQ(tr.iterations.size(), 2u);
  const Trajectory& a = tr.iterations[0].trajectory;
  const Trajectory& b = tr.iterations[1].trajectory;
  for (std::size_t k = 0; k < a.size(); ++k)
    EXPECT_LE((a[k] - b[k]).norm(), 1e-4 + 1e-7);
}

TEST(Sco, IterationCapStopsEarly)
{
  const ScoSetup st = active_rate_setup();
  ScoConfig cfg;
  cfg.n_it_max = 1;
  cfg.epsilon = 1e-12;
  const PlanResult r = plan(st.s, st.model, PlannerSettings{}, cfg, SolverSettings{});
  EXPECT_EQ(r.trace.iterations.size(), 2u);
  EXPECT_EQ(r.status, PlanStatus::IterationLimit);
}

TEST(Sco, InfeasibleFloorReportsInfeasible)
{
  ScoSetup st = active_rate_setup();
  st.s.r_min *= 10.0;
  const PlanResult r = plan(st.s, st.model, PlannerSettings{}, ScoConfig{}, SolverSettings{});
  EXPECT_EQ(r.status, PlanStatus::Infeasible);
  EXPECT_FALSE(r.init.feasible);
  EXPECT_TRUE(r.trace.iterations.empty());
}

TEST(Sco, InfeasibleInitialTrajectoryThrows)
{
  const ScoSetup st = active_rate_setup();
  Trajectory bad(static_cast<std::size_t>(st.s.K) + 1, st.s.q_s);
  bad.back() = st.s.q_d;
  EXPECT_THROW(run_sco(st.s, st.model, bad, ScoConfig{}, SolverSettings{}), ScoError);
}

TEST(Sco, ConfigValidation)
{
  ScoConfig c;
  c.epsilon = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = ScoConfig{};
  c.n_it_max = 0;
  EXPECT_THROW(c.validate(), Error);
  c = ScoConfig{};
  c.trust_radius = -1.0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NO_THROW(ScoConfig{}.validate());
}

TEST(Audit, FlagsEachConstraint)
{
  Scenario s = reference_scenario();
  s.r_min = 0.0;
  const SnrModel model = oracle::direct_only_model();
  const InitialSelection init = select_initial(s, model, PlannerSettings{});
  ASSERT_TRUE(init.feasible);
  EXPECT_TRUE(audit_trajectory(init.trajectory, s, model).passed);

  Trajectory t = init.trajectory;
  t.front() += Position(1e-3, 0.0);
  EXPECT_FALSE(audit_trajectory(t, s, model).passed);

  t = init.trajectory;
  t[5] = s.obstacles[0].center();
  const AuditReport obstacle = audit_trajectory(t, s, model);
  EXPECT_FALSE(obstacle.passed);
  EXPECT_LT(obstacle.min_margin, s.d_s);

  s.r_min = 10.0 * rate(model, init.trajectory, s);
  const AuditReport low = audit_trajectory(init.trajectory, s, model);
  EXPECT_FALSE(low.passed);
  EXPECT_GT(low.max_violation, 0.5);
}
