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

#include <irsplan/scenario.hpp>

#include <irsplan/error.hpp>
#include <irsplan/textio.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace irsplan {

//==============================================================================
bool Workspace::contains(const Position& p) const
{
  return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
}

//==============================================================================
Position Workspace::clamp(const Position& p) const
{
  return {std::clamp(p.x(), x_min, x_max), std::clamp(p.y(), y_min, y_max)};
}

//==============================================================================
Obstacle::Obstacle(Position center, const Eigen::Matrix2d& shape, double height)
: _center(std::move(center)),
  _shape(shape),
  _height(height)
{
  if (!_center.allFinite() || !_shape.allFinite())
    throw Error(ErrorKind::InvalidObstacle, "non-finite obstacle data");
  if (std::abs(_shape(0, 1) - _shape(1, 0)) > 1e-12)
    throw Error(ErrorKind::InvalidObstacle, "shape matrix is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(_shape);
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorKind::InvalidObstacle,
        "shape matrix is not positive definite");
  if (!(height > 0.0))
    throw Error(ErrorKind::InvalidObstacle, "obstacle height must be > 0");
  _shape_inv = _shape.inverse();
}

//==============================================================================
Obstacle Obstacle::ellipse(
  Position center,
  double length,
  double width,
  double height,
  double angle_rad)
{
  if (!(length > 0.0) || !(width > 0.0))
    throw Error(ErrorKind::InvalidObstacle, "ellipse axes must be > 0");
  const double a = 0.5 * length;
  const double b = 0.5 * width;
  const Eigen::Rotation2Dd rot(angle_rad);
  const Eigen::Matrix2d r = rot.toRotationMatrix();
  Eigen::Matrix2d shape = r * Eigen::Vector2d(a * a, b * b).asDiagonal()
    * r.transpose();
  // Remove round-off asymmetry from the rotation product.
  shape(0, 1) = shape(1, 0) = 0.5 * (shape(0, 1) + shape(1, 0));
  return Obstacle(std::move(center), shape, height);
}

//==============================================================================
LosClass LosClass::from_index(int index)
{
  if (index < 0 || index >= kClassCount)
    throw Error(ErrorKind::Domain, "class index out of range");
  return {static_cast<LinkClass>(index / 2), static_cast<LinkClass>(index % 2)};
}

std::string LosClass::label() const
{
  return "ap_" + to_string(ap) + "/irs_" + to_string(irs);
}

std::string to_string(LinkClass c)
{
  return c == LinkClass::Los ? "los" : "nlos";
}

LinkClass link_class_from_string(const std::string& s)
{
  if (s == "los")
    return LinkClass::Los;
  if (s == "nlos")
    return LinkClass::Nlos;
  throw Error(ErrorKind::Parse, "unknown link class '" + s + "'");
}

//==============================================================================
double Scenario::irs_ap_distance() const
{
  const double dz = z_i - z_a;
  return std::sqrt(dz * dz + (irs_pos - ap_pos).squaredNorm());
}

//==============================================================================
void Scenario::validate() const
{
  auto fail = [](const std::string& msg)
    {
      throw Error(ErrorKind::InvalidScenario, msg);
    };

  if (K < 1)
    fail("K must be >= 1");
  if (!(delta_t > 0.0))
    fail("delta_t must be > 0");
  if (!(v_max > 0.0))
    fail("v_max must be > 0");
  if (!(d_s >= 1.0))
    fail("d_s must be >= 1");
  if (c1 < 0.0 || c2 < 0.0 || c3 < 0.0)
    fail("energy constants must be >= 0");
  if (!(p_t >= 0.0) || !(noise_power > 0.0))
    fail("p_t must be >= 0 and the noise power > 0");
  if (!(bandwidth_hz > 0.0) || !(rho > 0.0))
    fail("bandwidth and rho must be > 0");
  if (n_antennas < 1 || m_elements < 0)
    fail("need N >= 1 and M >= 0");
  if (!(workspace.x_max > workspace.x_min)
    || !(workspace.y_max > workspace.y_min))
    fail("empty workspace");
  if (!q_s.allFinite() || !q_d.allFinite())
    fail("non-finite endpoint");
  for (std::size_t i = 0; i < obstacles.size(); ++i)
  {
    if (obstacle_margin(q_s, obstacles[i]) < d_s)
      fail("start position violates obstacle " + std::to_string(i));
    if (obstacle_margin(q_d, obstacles[i]) < d_s)
      fail("goal position violates obstacle " + std::to_string(i));
  }
}

//==============================================================================
Scenario reference_scenario()
{
  Scenario s;
  s.p_t = dbm_to_watts(20.0);
  s.noise_power = dbm_to_watts(-80.0);
  s.rho = db_loss_to_gain(68.0);
  const double h = 2.0;
  s.obstacles = {
    Obstacle::ellipse({16.0, 19.5}, 6.0, 4.0, h),
    Obstacle::ellipse({34.0, 19.5}, 6.0, 4.0, h),
    Obstacle::ellipse({20.5, 10.0}, 6.0, 4.0, h),
    Obstacle::ellipse({29.5, 10.0}, 6.0, 4.0, h),
    Obstacle::ellipse({8.0, 6.0}, 6.0, 4.0, h, std::numbers::pi / 4.0),
    Obstacle::ellipse({42.0, 24.0}, 6.0, 4.0, h, std::numbers::pi / 4.0),
  };
  return s;
}

//==============================================================================
double dbm_to_watts(double dbm)
{
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double db_loss_to_gain(double loss_db)
{
  return std::pow(10.0, -loss_db / 10.0);
}

//==============================================================================
double slot_energy(double step, const Scenario& s)
{
  return s.c1 * step * step / s.delta_t + s.c2 * step + s.c3 * s.delta_t;
}

//==============================================================================
double motion_energy(std::span<const Position> traj, const Scenario& s)
{
  if (traj.size() != static_cast<std::size_t>(s.K) + 1)
    throw Error(ErrorKind::InvalidTrajectory,
        "expected " + std::to_string(s.K + 1) + " waypoints, got "
        + std::to_string(traj.size()));

  double e = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k)
    e += slot_energy((traj[k] - traj[k - 1]).norm(), s);
  return e;
}

//==============================================================================
double obstacle_margin(const Position& q, const Obstacle& o)
{
  const Eigen::Vector2d u = q - o.center();
  return u.dot(o.shape_inverse() * u);
}

double min_obstacle_margin(const Position& q, const Scenario& s)
{
  double m = std::numeric_limits<double>::infinity();
  for (const auto& o : s.obstacles)
    m = std::min(m, obstacle_margin(q, o));
  return m;
}

//==============================================================================
bool segment_blocked(
  const Position& from, double z_from,
  const Position& to, double z_to,
  const Obstacle& o)
{
  const Eigen::Matrix2d& Q = o.shape_inverse();
  const Eigen::Vector2d u = from - o.center();
  const Eigen::Vector2d v = to - from;

  const double a = v.dot(Q * v);
  const double b = u.dot(Q * v);
  const double c = u.dot(Q * u) - 1.0;

  double lo = 0.0;
  double hi = 1.0;
  if (a <= 1e-300)
  {
    // Vertical segment: blocked iff the footprint contains the point.
    if (c >= 0.0)
      return false;
  }
  else
  {
    const double disc = b * b - a * c;
    if (disc <= 0.0)
      return false;
    const double root = std::sqrt(disc);
    lo = std::max(0.0, (-b - root) / a);
    hi = std::min(1.0, (-b + root) / a);
    if (!(lo < hi))
      return false;
  }

  const double z_lo = z_from + lo * (z_to - z_from);
  const double z_hi = z_from + hi * (z_to - z_from);
  return std::min(z_lo, z_hi) < o.height();
}

//==============================================================================
LosClass los_class(const Position& q, const Scenario& s)
{
  LosClass out;
  for (const auto& o : s.obstacles)
  {
    if (out.ap == LinkClass::Los
      && segment_blocked(q, s.z_r, s.ap_pos, s.z_a, o))
      out.ap = LinkClass::Nlos;
    if (out.irs == LinkClass::Los
      && segment_blocked(q, s.z_r, s.irs_pos, s.z_i, o))
      out.irs = LinkClass::Nlos;
  }
  return out;
}

//==============================================================================
Distances distances(const Position& q, const Scenario& s)
{
  const double dza = s.z_r - s.z_a;
  const double dzi = s.z_r - s.z_i;
  return {
    std::sqrt(dza * dza + (q - s.ap_pos).squaredNorm()),
    std::sqrt(dzi * dzi + (q - s.irs_pos).squaredNorm())};
}

//==============================================================================
std::string canonical_text(const Scenario& s)
{
  std::ostringstream out;
  auto f = [](double v) { return format_double(v); };
  out << "workspace=" << f(s.workspace.x_min) << ',' << f(s.workspace.x_max)
      << ',' << f(s.workspace.y_min) << ',' << f(s.workspace.y_max) << '\n'
      << "ap=" << f(s.ap_pos.x()) << ',' << f(s.ap_pos.y()) << ',' << f(s.z_a)
      << '\n'
      << "irs=" << f(s.irs_pos.x()) << ',' << f(s.irs_pos.y()) << ','
      << f(s.z_i) << '\n'
      << "z_r=" << f(s.z_r) << '\n'
      << "p_t=" << f(s.p_t) << '\n'
      << "noise=" << f(s.noise_power) << '\n'
      << "bandwidth=" << f(s.bandwidth_hz) << '\n'
      << "rho=" << f(s.rho) << '\n'
      << "N=" << s.n_antennas << '\n'
      << "M=" << s.m_elements << '\n'
      << "exponents=" << f(s.los_exponent) << ',' << f(s.nlos_exponent) << '\n';
  for (const auto& o : s.obstacles)
  {
    out << "obstacle=" << f(o.center().x()) << ',' << f(o.center().y()) << ','
        << f(o.shape()(0, 0)) << ',' << f(o.shape()(0, 1)) << ','
        << f(o.shape()(1, 1)) << ',' << f(o.height()) << '\n';
  }
  return out.str();
}

std::uint64_t scenario_hash(const Scenario& s)
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char ch : canonical_text(s))
  {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v)
{
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i)
  {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

} // namespace irsplan
