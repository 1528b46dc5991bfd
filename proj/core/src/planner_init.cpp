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


#include <irsplan/planner.hpp>

#include <irsplan/error.hpp>
#include <irsplan/textio.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace irsplan {

std::string_view to_string(InitLabel label)
{
  return label == InitLabel::ME ? "ME" : "MR";
}

namespace {

constexpr double kEdgeSlack = 1e-9;

double node_rate(const Position& q, const Scenario& s, const SnrModel& model)
{
  const Distances d = distances(q, s);
  return slot_rate(model.at(los_class(q, s)), d.ap, d.irs, s);
}

void check_endpoint(const Position& q, const Scenario& s, const char* name)
{
  const double slack = 1e-9;
  const Workspace& w = s.workspace;
  if (q.x() < w.x_min - slack || q.x() > w.x_max + slack
    || q.y() < w.y_min - slack || q.y() > w.y_max + slack)
    throw Error(ErrorKind::InfeasibleEndpoint,
        std::string(name) + " lies outside the workspace");
  const double margin = min_obstacle_margin(q, s);
  if (margin < s.d_s)
    throw Error(ErrorKind::InfeasibleEndpoint,
        std::string(name) + " has obstacle margin " + format_double(margin)
        + " below the safety level " + format_double(s.d_s));
}

} // namespace

TimeExpandedGraph build_graph(
  const Scenario& s,
  const SnrModel& model,
  InitLabel mode,
  double g)
{
  if (!(g > 0.0) || !std::isfinite(g))
    throw Error(ErrorKind::Domain, "grid spacing must be positive");
  if (s.K < 1)
    throw Error(ErrorKind::InvalidScenario, "K must be at least 1");
  check_endpoint(s.q_s, s, "start");
  check_endpoint(s.q_d, s, "goal");

  const Workspace& w = s.workspace;
  const double eps = 1e-9;
  const auto i_lo = static_cast<long>(std::ceil((w.x_min - s.q_s.x()) / g - eps));
  const auto i_hi = static_cast<long>(std::floor((w.x_max - s.q_s.x()) / g + eps));
  const auto j_lo = static_cast<long>(std::ceil((w.y_min - s.q_s.y()) / g - eps));
  const auto j_hi = static_cast<long>(std::floor((w.y_max - s.q_s.y()) / g + eps));
  const long ni = i_hi - i_lo + 1;
  const long nj = j_hi - j_lo + 1;

  auto interior = std::make_shared<TimeExpandedGraph::Nodes>();
  std::vector<long> grid_index(static_cast<std::size_t>(ni * nj), -1);
  for (long j = j_lo; j <= j_hi; ++j)
  {
    for (long i = i_lo; i <= i_hi; ++i)
    {
      const Position q(s.q_s.x() + static_cast<double>(i) * g,
        s.q_s.y() + static_cast<double>(j) * g);
      if (min_obstacle_margin(q, s) < s.d_s)
        continue;
      grid_index[static_cast<std::size_t>((j - j_lo) * ni + (i - i_lo))] =
        static_cast<long>(interior->size());
      interior->push_back(q);
    }
  }

  const double d_max = s.d_max();
  const auto reach = static_cast<long>(std::floor(d_max / g + eps));
  std::vector<std::pair<long, long>> offsets;
  for (long dj = -reach; dj <= reach; ++dj)
    for (long di = -reach; di <= reach; ++di)
      if (g * std::hypot(static_cast<double>(di), static_cast<double>(dj)) <= d_max + kEdgeSlack)
        offsets.emplace_back(di, dj);

  // Per-destination cost term.
  std::vector<double> dest_rate;
  double r_cap = 0.0;
  if (mode == InitLabel::MR)
  {
    dest_rate.resize(interior->size());
    for (std::size_t v = 0; v < interior->size(); ++v)
    {
      dest_rate[v] = node_rate((*interior)[v], s, model);
      r_cap = std::max(r_cap, dest_rate[v]);
    }
    r_cap = std::max({r_cap, node_rate(s.q_s, s, model), node_rate(s.q_d, s, model)});
  }
  auto cost = [&](const Position& from, const Position& to, double to_rate)
    {
      if (mode == InitLabel::ME)
        return slot_energy((to - from).norm(), s);
      return r_cap - to_rate;
    };

  auto middle = std::make_shared<TimeExpandedGraph::Adjacency>(interior->size());
  for (long j = j_lo; j <= j_hi; ++j)
  {
    for (long i = i_lo; i <= i_hi; ++i)
    {
      const long from = grid_index[static_cast<std::size_t>((j - j_lo) * ni + (i - i_lo))];
      if (from < 0)
        continue;
      auto& out = (*middle)[static_cast<std::size_t>(from)];
      for (const auto& [di, dj] : offsets)
      {
        const long ii = i + di;
        const long jj = j + dj;
        if (ii < i_lo || ii > i_hi || jj < j_lo || jj > j_hi)
          continue;
        const long to = grid_index[static_cast<std::size_t>((jj - j_lo) * ni + (ii - i_lo))];
        if (to < 0)
          continue;
        const auto t = static_cast<std::size_t>(to);
        out.push_back({static_cast<std::uint32_t>(to),
          cost((*interior)[static_cast<std::size_t>(from)], (*interior)[t],
            mode == InitLabel::MR ? dest_rate[t] : 0.0)});
      }
      std::sort(out.begin(), out.end(),
        [](const GraphEdge& a, const GraphEdge& b) { return a.to < b.to; });
    }
  }

  auto start = std::make_shared<TimeExpandedGraph::Nodes>(1, s.q_s);
  auto goal = std::make_shared<TimeExpandedGraph::Nodes>(1, s.q_d);
  const double goal_rate = mode == InitLabel::MR ? node_rate(s.q_d, s, model) : 0.0;

  TimeExpandedGraph graph;
  graph.K = s.K;
  if (s.K == 1)
  {
    auto direct = std::make_shared<TimeExpandedGraph::Adjacency>(1);
    if ((s.q_d - s.q_s).norm() <= d_max + kEdgeSlack)
      (*direct)[0].push_back({0, cost(s.q_s, s.q_d, goal_rate)});
    graph.layers = {start, goal};
    graph.edges = {direct};
    return graph;
  }

  auto first = std::make_shared<TimeExpandedGraph::Adjacency>(1);
  for (std::size_t v = 0; v < interior->size(); ++v)
  {
    if (((*interior)[v] - s.q_s).norm() <= d_max + kEdgeSlack)
      (*first)[0].push_back({static_cast<std::uint32_t>(v),
        cost(s.q_s, (*interior)[v], mode == InitLabel::MR ? dest_rate[v] : 0.0)});
  }
  auto last = std::make_shared<TimeExpandedGraph::Adjacency>(interior->size());
  for (std::size_t v = 0; v < interior->size(); ++v)
  {
    if ((s.q_d - (*interior)[v]).norm() <= d_max + kEdgeSlack)
      (*last)[v].push_back({0, cost((*interior)[v], s.q_d, goal_rate)});
  }

  graph.layers.push_back(start);
  for (int l = 1; l < s.K; ++l)
    graph.layers.push_back(interior);
  graph.layers.push_back(goal);
  graph.edges.push_back(first);
  for (int l = 1; l < s.K - 1; ++l)
    graph.edges.push_back(middle);
  graph.edges.push_back(last);
  return graph;
}

GraphPath shortest_path(const TimeExpandedGraph& graph)
{
  const int K = graph.K;
  if (K < 1 || graph.layers.size() != static_cast<std::size_t>(K) + 1
    || graph.edges.size() != static_cast<std::size_t>(K))
    throw Error(ErrorKind::GraphInfeasible, "malformed time-expanded graph");

  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
  std::vector<double> best(graph.nodes(0).size(), 0.0);
  std::vector<std::vector<std::uint32_t>> pred(static_cast<std::size_t>(K) + 1);

  for (int l = 0; l < K; ++l)
  {
    const auto& adj = graph.out_edges(l);
    const std::size_t next_size = graph.nodes(l + 1).size();
    std::vector<double> next(next_size, inf);
    auto& p = pred[static_cast<std::size_t>(l) + 1];
    p.assign(next_size, none);
    for (std::size_t i = 0; i < best.size() && i < adj.size(); ++i)
    {
      if (best[i] == inf)
        continue;
      for (const GraphEdge& e : adj[i])
      {
        const double cand = best[i] + e.cost;
        if (cand < next[e.to])
        {
          next[e.to] = cand;
          p[e.to] = static_cast<std::uint32_t>(i);
        }
      }
    }
    best = std::move(next);
  }

  if (best.empty() || best[0] == inf)
    throw Error(ErrorKind::GraphInfeasible,
        "no " + std::to_string(K) + "-slot path connects start and goal");

  GraphPath path;
  path.cost = best[0];
  path.nodes.assign(static_cast<std::size_t>(K) + 1, 0);
  for (int l = K; l > 0; --l)
    path.nodes[static_cast<std::size_t>(l) - 1] =
      pred[static_cast<std::size_t>(l)][path.nodes[static_cast<std::size_t>(l)]];
  path.trajectory.reserve(path.nodes.size());
  for (int l = 0; l <= K; ++l)
    path.trajectory.push_back(graph.nodes(l)[path.nodes[static_cast<std::size_t>(l)]]);
  return path;
}

InitialSelection select_initial(
  const Scenario& s,
  const SnrModel& model,
  const PlannerSettings& settings)
{
  InitialSelection out;
  try
  {
    out.me = shortest_path(build_graph(s, model, InitLabel::ME, settings.grid_spacing)).trajectory;
    out.mr = shortest_path(build_graph(s, model, InitLabel::MR, settings.grid_spacing)).trajectory;
  }
  catch (const Error& e)
  {
    if (e.kind() != ErrorKind::GraphInfeasible && e.kind() != ErrorKind::InfeasibleEndpoint)
      throw;
    out.reason = e.what();
    return out;
  }

  out.me_audit = audit_trajectory(out.me, s, model);
  if (out.me_audit.passed)
  {
    out.feasible = true;
    out.label = InitLabel::ME;
    out.trajectory = out.me;
    return out;
  }
  out.mr_audit = audit_trajectory(out.mr, s, model);
  if (out.mr_audit.passed)
  {
    out.feasible = true;
    out.label = InitLabel::MR;
    out.trajectory = out.mr;
    return out;
  }
  out.reason = "neither initial solution is feasible (ME average rate "
    + format_double(out.me_audit.average_rate) + " bit/s, MR average rate "
    + format_double(out.mr_audit.average_rate) + " bit/s)";
  return out;
}

} // namespace irsplan
