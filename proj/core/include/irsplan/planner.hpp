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


#ifndef IRSPLAN__PLANNER_HPP
#define IRSPLAN__PLANNER_HPP

#include <irsplan/audit.hpp>
#include <irsplan/config.hpp>
#include <irsplan/scenario.hpp>
#include <irsplan/snrmodel.hpp>

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

namespace irsplan {

/// Edge-cost mode of the time-expanded graph.
enum class InitLabel
{
  ME, ///< minimum motion energy
  MR  ///< maximum rate
};

std::string_view to_string(InitLabel label);

struct GraphEdge
{
  std::uint32_t to = 0;
  double cost = 0.0;
};

/// Layers 0..K of waypoints. Layer 0 holds only q_s and layer K only q_d;
/// interior layers share one node set and one adjacency, so memory does not
/// grow with K.
struct TimeExpandedGraph
{
  using Nodes = std::vector<Position>;
  using Adjacency = std::vector<std::vector<GraphEdge>>;

  int K = 0;
  std::vector<std::shared_ptr<const Nodes>> layers;        ///< K + 1 entries
  std::vector<std::shared_ptr<const Adjacency>> edges;     ///< K entries

  const Nodes& nodes(int layer) const { return *layers.at(static_cast<std::size_t>(layer)); }
  const Adjacency& out_edges(int layer) const { return *edges.at(static_cast<std::size_t>(layer)); }
};

/// Builds the graph on a grid anchored at q_s with the given spacing.
/// Throws Error(InfeasibleEndpoint) when q_s or q_d violates the obstacle
/// margin or leaves the workspace.
TimeExpandedGraph build_graph(
  const Scenario& scenario,
  const SnrModel& model,
  InitLabel mode,
  double grid_spacing);

struct GraphPath
{
  Trajectory trajectory;
  std::vector<std::uint32_t> nodes; ///< node index per layer
  double cost = 0.0;
};

/// Exact minimum-cost layer-respecting path by dynamic programming. Ties go
/// to the smaller predecessor index. Throws Error(GraphInfeasible).
GraphPath shortest_path(const TimeExpandedGraph& graph);

struct InitialSelection
{
  bool feasible = false;
  InitLabel label = InitLabel::ME;
  Trajectory trajectory;

  Trajectory me;
  Trajectory mr;
  AuditReport me_audit;
  AuditReport mr_audit;
  std::string reason; ///< why no candidate was feasible
};

/// ME when it satisfies every constraint, otherwise MR, otherwise an
/// infeasible outcome (no exception).
InitialSelection select_initial(
  const Scenario& scenario,
  const SnrModel& model,
  const PlannerSettings& settings);

} // namespace irsplan

#endif // IRSPLAN__PLANNER_HPP
