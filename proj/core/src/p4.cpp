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

#include <irsplan/error.hpp>

namespace irsplan {

std::vector<ObstacleLinearization> linearize_obstacles(
  std::span<const Position> prev_traj,
  const std::vector<Obstacle>& obstacles)
{
  std::vector<ObstacleLinearization> cuts;
  if (prev_traj.size() < 2)
    return cuts;
  for (std::size_t k = 1; k + 1 < prev_traj.size(); ++k)
  {
    for (std::size_t o = 0; o < obstacles.size(); ++o)
    {
      const Obstacle& ob = obstacles[o];
      ObstacleLinearization cut;
      cut.k = k;
      cut.obstacle = o;
      cut.anchor = prev_traj[k];
      cut.value = obstacle_margin(prev_traj[k], ob);
      cut.gradient = 2.0 * ob.shape_inverse() * (prev_traj[k] - ob.center());
      cuts.push_back(cut);
    }
  }
  return cuts;
}

namespace {

// Accumulates rows of h - G x in K and of A x = b.
class Builder
{
public:
  explicit Builder(Eigen::Index n) : _n(n) {}

  struct Row
  {
    std::vector<std::pair<Eigen::Index, double>> g; ///< coefficients of G
    double h = 0.0;
  };

  void linear(Row r) { _linear.push_back(std::move(r)); }
  void cone(std::vector<Row> rows) { _soc.push_back(std::move(rows)); }
  void equality(Eigen::Index col, double value) { _eq.emplace_back(col, value); }

  ConicProblem finish(Eigen::VectorXd c, double c0) const
  {
    ConicProblem p;
    p.c = std::move(c);
    p.c0 = c0;
    Eigen::Index m = static_cast<Eigen::Index>(_linear.size());
    for (const auto& blk : _soc)
      m += static_cast<Eigen::Index>(blk.size());
    p.G = Eigen::MatrixXd::Zero(m, _n);
    p.h = Eigen::VectorXd::Zero(m);
    Eigen::Index row = 0;
    auto put = [&](const Row& r)
      {
        for (const auto& [col, v] : r.g)
          p.G(row, col) += v;
        p.h[row] = r.h;
        ++row;
      };
    for (const auto& r : _linear)
      put(r);
    p.dims.linear = static_cast<int>(_linear.size());
    for (const auto& blk : _soc)
    {
      for (const auto& r : blk)
        put(r);
      p.dims.soc.push_back(static_cast<int>(blk.size()));
    }
    const auto neq = static_cast<Eigen::Index>(_eq.size());
    p.A = Eigen::MatrixXd::Zero(neq, _n);
    p.b = Eigen::VectorXd::Zero(neq);
    for (Eigen::Index i = 0; i < neq; ++i)
    {
      p.A(i, _eq[static_cast<std::size_t>(i)].first) = 1.0;
      p.b[i] = _eq[static_cast<std::size_t>(i)].second;
    }
    return p;
  }

private:
  Eigen::Index _n;
  std::vector<Row> _linear;
  std::vector<std::vector<Row>> _soc;
  std::vector<std::pair<Eigen::Index, double>> _eq;
};

} // namespace

P4Problem assemble_p4(
  const Scenario& s,
  const RateLinearization& lin,
  std::span<const ObstacleLinearization> cuts,
  std::span<const Position> prev,
  double trust_radius)
{
  const int K = s.K;
  if (K < 1 || prev.size() != static_cast<std::size_t>(K) + 1
    || lin.slots().size() != prev.size())
    throw Error(ErrorKind::Assembly, "P4 needs K+1 waypoints and K+1 linearized slots");
  if (!(trust_radius >= 0.0))
    throw Error(ErrorKind::Assembly, "trust radius must be nonnegative");
  for (const auto& cut : cuts)
  {
    if (cut.k == 0 || cut.k >= static_cast<std::size_t>(K))
      throw Error(ErrorKind::Assembly, "obstacle cut on a fixed endpoint");
  }

  P4Problem out;
  P4Layout& L = out.layout;
  L.K = K;
  Eigen::Index n = 2 * (K + 1) + 2 * K;
  out.has_rate_constraint = s.r_min > 0.0;
  L.s_a.assign(static_cast<std::size_t>(K) + 1, -1);
  L.s_i.assign(static_cast<std::size_t>(K) + 1, -1);
  if (out.has_rate_constraint)
  {
    for (std::size_t k = 0; k <= static_cast<std::size_t>(K); ++k)
    {
      const auto& g = lin.slots()[k].grad;
      if (g.d_a != 0.0)
        L.s_a[k] = n++;
      if (g.d_i != 0.0)
        L.s_i[k] = n++;
    }
  }
  L.n = n;

  Builder B(n);
  using Row = Builder::Row;
  const double d_max = s.d_max();

  for (int k = 1; k <= K; ++k)
    B.linear(Row{{{L.t(k), 1.0}}, d_max});

  for (const auto& cut : cuts)
  {
    // gradient^T q >= d_s - value + gradient^T anchor
    const int k = static_cast<int>(cut.k);
    const double rhs = s.d_s - cut.value + cut.gradient.dot(cut.anchor);
    B.linear(Row{{{L.q(k, 0), -cut.gradient.x()}, {L.q(k, 1), -cut.gradient.y()}}, -rhs});
  }

  if (out.has_rate_constraint)
  {
    // sum_k (-g_a s_a - g_i s_i) <= sum_k (r0 - g_a d_a0 - g_i d_i0) - K r_min,
    // divided by the bandwidth.
    const double bw = s.bandwidth_hz;
    Row r;
    double rhs = -K * s.r_min / bw;
    for (std::size_t k = 0; k <= static_cast<std::size_t>(K); ++k)
    {
      const auto& sl = lin.slots()[k];
      rhs += (sl.value - sl.grad.d_a * sl.d_a0 - sl.grad.d_i * sl.d_i0) / bw;
      if (L.s_a[k] >= 0)
        r.g.emplace_back(L.s_a[k], -sl.grad.d_a / bw);
      if (L.s_i[k] >= 0)
        r.g.emplace_back(L.s_i[k], -sl.grad.d_i / bw);
    }
    r.h = rhs;
    B.linear(std::move(r));
  }

  for (int k = 1; k <= K; ++k)
  {
    // ||q_k - q_{k-1}|| <= t_k
    B.cone({
      Row{{{L.t(k), -1.0}}, 0.0},
      Row{{{L.q(k, 0), -1.0}, {L.q(k - 1, 0), 1.0}}, 0.0},
      Row{{{L.q(k, 1), -1.0}, {L.q(k - 1, 1), 1.0}}, 0.0}});
    // t_k^2 <= u_k  as  ||(2 t_k, u_k - 1)|| <= u_k + 1
    B.cone({
      Row{{{L.u(k), -1.0}}, 1.0},
      Row{{{L.t(k), -2.0}}, 0.0},
      Row{{{L.u(k), -1.0}}, -1.0}});
  }

  if (trust_radius > 0.0)
  {
    for (int k = 1; k < K; ++k)
    {
      const Position& p = prev[static_cast<std::size_t>(k)];
      B.cone({
        Row{{}, trust_radius},
        Row{{{L.q(k, 0), -1.0}}, -p.x()},
        Row{{{L.q(k, 1), -1.0}}, -p.y()}});
    }
  }
  else
  {
    for (int k = 1; k < K; ++k)
    {
      B.equality(L.q(k, 0), prev[static_cast<std::size_t>(k)].x());
      B.equality(L.q(k, 1), prev[static_cast<std::size_t>(k)].y());
    }
  }

  auto distance_cone = [&](Eigen::Index col, int k, const Position& anchor, double dz)
    {
      B.cone({
        Row{{{col, -1.0}}, 0.0},
        Row{{{L.q(k, 0), -1.0}}, -anchor.x()},
        Row{{{L.q(k, 1), -1.0}}, -anchor.y()},
        Row{{}, dz}});
    };
  for (int k = 0; k <= K; ++k)
  {
    const auto kk = static_cast<std::size_t>(k);
    if (L.s_a[kk] >= 0)
      distance_cone(L.s_a[kk], k, s.ap_pos, s.z_r - s.z_a);
    if (L.s_i[kk] >= 0)
      distance_cone(L.s_i[kk], k, s.irs_pos, s.z_r - s.z_i);
  }

  B.equality(L.q(0, 0), s.q_s.x());
  B.equality(L.q(0, 1), s.q_s.y());
  B.equality(L.q(K, 0), s.q_d.x());
  B.equality(L.q(K, 1), s.q_d.y());

  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int k = 1; k <= K; ++k)
  {
    c[L.u(k)] = s.c1 / s.delta_t;
    c[L.t(k)] = s.c2;
  }
  out.conic = B.finish(std::move(c), K * s.c3 * s.delta_t);
  out.conic.validate();
  return out;
}

SubproblemSolution solve_p4(
  const P4Problem& problem,
  const Scenario& s,
  const SolverSettings& settings)
{
  const ConicSolution sol = solve(problem.conic, settings);
  SubproblemSolution out;
  out.status = sol.status;
  out.residuals = sol.residuals;
  out.iterations = sol.iterations;
  out.conic_objective = sol.objective;
  const int K = problem.layout.K;
  out.trajectory.resize(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k)
    out.trajectory[static_cast<std::size_t>(k)] = Position(
      sol.x[problem.layout.q(k, 0)], sol.x[problem.layout.q(k, 1)]);
  out.trajectory.front() = s.q_s;
  out.trajectory.back() = s.q_d;
  out.objective = motion_energy(out.trajectory, s);
  return out;
}

} // namespace irsplan
