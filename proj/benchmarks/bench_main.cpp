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

#include <irsplan/p4.hpp>
#include <irsplan/planner.hpp>
#include <irsplan/radiomap.hpp>
#include <irsplan/snrmodel.hpp>

#include <benchmark/benchmark.h>

using namespace irsplan;

namespace {

SnrModel direct_model()
{
  ClassModel m;
  m.C = 2.5e-6;
  m.nu = 2.0;
  m.mu = 2.0;
  return SnrModel::uniform(m);
}

} // namespace

// 200 fading draws of one map cell.
static void BM_CellSamples(benchmark::State& state)
{
  Scenario s = reference_scenario();
  s.m_elements = static_cast<int>(state.range(0));
  const Position q(12.3, 7.9);
  const LosClass cls = los_class(q, s);
  for (auto _ : state)
    benchmark::DoNotOptimize(cell_samples(s, q, cls, 200, 1, 42));
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_CellSamples)->Arg(0)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_BuildGraph(benchmark::State& state)
{
  const Scenario s = reference_scenario();
  const SnrModel model = direct_model();
  const double g = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_graph(s, model, InitLabel::ME, g));
}
BENCHMARK(BM_BuildGraph)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_ShortestPath(benchmark::State& state)
{
  const Scenario s = reference_scenario();
  const double g = 1.0 / static_cast<double>(state.range(0));
  const TimeExpandedGraph graph = build_graph(s, direct_model(), InitLabel::ME, g);
  for (auto _ : state)
    benchmark::DoNotOptimize(shortest_path(graph));
}
BENCHMARK(BM_ShortestPath)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

// One K = 30 subproblem around the minimum-energy path with an active rate floor.
static void BM_SolveP4(benchmark::State& state)
{
  Scenario s = reference_scenario();
  const SnrModel model = direct_model();
  const Trajectory prev =
    shortest_path(build_graph(s, model, InitLabel::ME, 1.0)).trajectory;
  const std::vector<LosClass> cls = slot_classes(prev, s);
  const RateLinearization lin = linearize_rate(model, cls, prev, s);
  s.r_min = lin.average(prev, s);
  const auto cuts = linearize_obstacles(prev, s.obstacles);
  const P4Problem p = assemble_p4(s, lin, cuts, prev, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_p4(p, s, SolverSettings{}));
}
BENCHMARK(BM_SolveP4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
