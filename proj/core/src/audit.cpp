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


#include <irsplan/audit.hpp>

#include <irsplan/textio.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace irsplan {

namespace {

// Visibility test in the frame where the obstacle footprint is the unit disc.
bool sightline_blocked(const Position& q, double zq, const Position& p, double zp,
  const Obstacle& o)
{
  const Eigen::LLT<Eigen::Matrix2d> llt(o.shape_inverse());
  const Eigen::Matrix2d Lt = llt.matrixU();
  const Eigen::Vector2d a = Lt * (q - o.center());
  const Eigen::Vector2d d = Lt * (p - q);
  const double dd = d.squaredNorm();
  double t0 = 0.0;
  double t1 = 1.0;
  if (dd == 0.0 || dd < 1e-300)
  {
    if (a.squaredNorm() >= 1.0)
      return false;
  }
  else
  {
    const double mid = -a.dot(d) / dd;
    const double closest = (a + mid * d).squaredNorm();
    if (closest >= 1.0)
      return false;
    const double half = std::sqrt((1.0 - closest) / dd);
    t0 = std::max(0.0, mid - half);
    t1 = std::min(1.0, mid + half);
    if (!(t0 < t1))
      return false;
  }
  const double z_low = std::min(zq + t0 * (zp - zq), zq + t1 * (zp - zq));
  return z_low < o.height();
}

double slot_bits(const Position& q, const Scenario& s, const SnrModel& model)
{
  bool ap_los = true;
  bool irs_los = true;
  for (const auto& o : s.obstacles)
  {
    ap_los = ap_los && !sightline_blocked(q, s.z_r, s.ap_pos, s.z_a, o);
    irs_los = irs_los && !sightline_blocked(q, s.z_r, s.irs_pos, s.z_i, o);
  }
  LosClass cls;
  cls.ap = ap_los ? LinkClass::Los : LinkClass::Nlos;
  cls.irs = irs_los ? LinkClass::Los : LinkClass::Nlos;
  const ClassModel& m = model.at(cls);

  const double da = std::hypot(q.x() - s.ap_pos.x(), q.y() - s.ap_pos.y(), s.z_r - s.z_a);
  const double di = std::hypot(q.x() - s.irs_pos.x(), q.y() - s.irs_pos.y(), s.z_r - s.z_i);
  const double gain = m.A * std::exp(-m.nu * std::log(di))
    + m.B * std::exp(-0.5 * m.nu * std::log(di) - 0.5 * m.mu * std::log(da))
    + m.C * std::exp(-m.mu * std::log(da));
  return s.bandwidth_hz * std::log2(1.0 + gain * s.p_t / s.noise_power);
}

} // namespace

AuditReport audit_trajectory(
  std::span<const Position> traj,
  const Scenario& s,
  const SnrModel& model,
  const AuditTolerances& tol)
{
  AuditReport r;
  auto violate = [&](double amount, double allowed, const std::string& what)
    {
      r.max_violation = std::max(r.max_violation, std::max(amount, 0.0));
      if (amount > allowed)
        r.failures.push_back(what);
    };

  if (traj.size() != static_cast<std::size_t>(s.K) + 1)
  {
    r.failures.push_back("expected " + std::to_string(s.K + 1) + " waypoints, got "
      + std::to_string(traj.size()));
    r.max_violation = std::numeric_limits<double>::infinity();
    return r;
  }

  r.endpoints_exact = traj.front() == s.q_s && traj.back() == s.q_d;
  if (!r.endpoints_exact)
  {
    const double err = std::max((traj.front() - s.q_s).norm(), (traj.back() - s.q_d).norm());
    r.max_violation = std::max(r.max_violation, err);
    r.failures.push_back("endpoints differ from start/goal by " + format_double(err) + " m");
  }

  const double d_max = s.v_max * s.delta_t;
  for (std::size_t k = 1; k < traj.size(); ++k)
  {
    const double step = std::hypot(traj[k].x() - traj[k - 1].x(), traj[k].y() - traj[k - 1].y());
    r.max_step = std::max(r.max_step, step);
    violate(step - d_max, tol.step,
      "slot " + std::to_string(k) + " step " + format_double(step) + " m exceeds "
      + format_double(d_max) + " m");
  }

  r.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.size(); ++k)
  {
    for (std::size_t o = 0; o < s.obstacles.size(); ++o)
    {
      const Obstacle& ob = s.obstacles[o];
      const Eigen::Vector2d d = traj[k] - ob.center();
      const double margin = d.dot(ob.shape().ldlt().solve(d));
      r.min_margin = std::min(r.min_margin, margin);
      violate(s.d_s - margin, tol.obstacle,
        "waypoint " + std::to_string(k) + " obstacle " + std::to_string(o) + " margin "
        + format_double(margin) + " below " + format_double(s.d_s));
    }
  }

  double sum = 0.0;
  for (const auto& q : traj)
    sum += slot_bits(q, s, model);
  r.average_rate = sum / s.K;
  if (s.r_min > 0.0)
  {
    violate((s.r_min - r.average_rate) / s.r_min, tol.rate_relative,
      "average rate " + format_double(r.average_rate) + " bit/s below r_min "
      + format_double(s.r_min));
  }

  r.passed = r.failures.empty();
  return r;
}

} // namespace irsplan
