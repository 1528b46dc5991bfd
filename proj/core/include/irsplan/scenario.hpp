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

#ifndef IRSPLAN__SCENARIO_HPP
#define IRSPLAN__SCENARIO_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace irsplan {

/// Planar robot coordinate [x, y] in meters.
using Position = Eigen::Vector2d;

/// Waypoints q_0 .. q_K, one per slot boundary.
using Trajectory = std::vector<Position>;

struct Workspace
{
  double x_min = 0.0;
  double x_max = 50.0;
  double y_min = 0.0;
  double y_max = 30.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(const Position& p) const;
  Position clamp(const Position& p) const;

  friend bool operator==(const Workspace&, const Workspace&) = default;
};

//==============================================================================
/// An elliptic cylinder. The footprint is the unit level set of the quadratic
/// form (q - center)^T shape^{-1} (q - center); the collision constraint uses
/// the d_s level set of the same form.
class Obstacle
{
public:
  Obstacle(Position center, const Eigen::Matrix2d& shape, double height);

  /// Ellipse with full axis lengths `length` (along the rotated x axis) and
  /// `width`, rotated counter-clockwise by `angle_rad`.
  static Obstacle ellipse(
    Position center,
    double length,
    double width,
    double height,
    double angle_rad = 0.0);

  const Position& center() const { return _center; }
  const Eigen::Matrix2d& shape() const { return _shape; }
  const Eigen::Matrix2d& shape_inverse() const { return _shape_inv; }
  double height() const { return _height; }

private:
  Position _center;
  Eigen::Matrix2d _shape;
  Eigen::Matrix2d _shape_inv;
  double _height;
};

//==============================================================================
enum class LinkClass : std::uint8_t
{
  Los = 0,
  Nlos = 1
};

/// Visibility of the robot from the AP and from the IRS.
struct LosClass
{
  LinkClass ap = LinkClass::Los;
  LinkClass irs = LinkClass::Los;

  int index() const { return 2 * static_cast<int>(ap) + static_cast<int>(irs); }
  static LosClass from_index(int index);
  std::string label() const;

  friend bool operator==(const LosClass&, const LosClass&) = default;
};

inline constexpr int kClassCount = 4;

std::string to_string(LinkClass c);
LinkClass link_class_from_string(const std::string& s);

//==============================================================================
/// Static problem data. Everything is stored in linear SI units; dB/dBm
/// conversion happens when a configuration is ingested.
struct Scenario
{
  Workspace workspace;
  Position ap_pos{25.0, 30.0};
  Position irs_pos{25.0, 0.0};
  double z_r = 0.5;
  double z_a = 5.0;
  double z_i = 2.5;
  std::vector<Obstacle> obstacles;

  int K = 30;
  double delta_t = 1.0;
  double v_max = 3.0;
  double d_s = 1.35;

  // Motion energy constants [J s/m^2, J/m, W].
  double c1 = 4.39;
  double c2 = 24.67;
  double c3 = 14.77;

  double p_t = 0.1;           // W
  double noise_power = 1e-11; // W
  double bandwidth_hz = 200e6;
  double rho = 1.5848931924611107e-07; // -68 dB
  int n_antennas = 16;
  int m_elements = 64;
  double los_exponent = 2.0;
  double nlos_exponent = 4.5;

  Position q_s{9.5, 15.5};
  Position q_d{40.5, 14.5};
  double r_min = 2e9; // bits/s

  double d_max() const { return v_max * delta_t; }
  double snr_scale() const { return p_t / noise_power; }
  double irs_ap_distance() const;
  double exponent(LinkClass c) const
  {
    return c == LinkClass::Los ? los_exponent : nlos_exponent;
  }

  /// Throws Error(InvalidScenario) describing the first violated invariant.
  void validate() const;
};

/// Geometry and constants of the 50 x 30 m reference hall: AP at [25, 30],
/// IRS at [25, 0], six 6 x 4 x 2 m elliptic obstacles.
Scenario reference_scenario();

//==============================================================================
double dbm_to_watts(double dbm);
double db_loss_to_gain(double loss_db);

/// Energy of one slot that travels `step` meters.
double slot_energy(double step, const Scenario& scenario);

/// Total motion energy of a K-slot trajectory. Throws InvalidTrajectory when
/// traj.size() != K + 1.
double motion_energy(std::span<const Position> traj, const Scenario& scenario);

/// (q - c)^T P^{-1} (q - c).
double obstacle_margin(const Position& q, const Obstacle& o);

/// Smallest margin over all obstacles (+inf with no obstacles).
double min_obstacle_margin(const Position& q, const Scenario& scenario);

/// True when the 3D segment crosses the elliptic cylinder below its height.
bool segment_blocked(
  const Position& from, double z_from,
  const Position& to, double z_to,
  const Obstacle& o);

LosClass los_class(const Position& q, const Scenario& scenario);

struct Distances
{
  double ap;
  double irs;
};

Distances distances(const Position& q, const Scenario& scenario);

/// Canonical text of the fields a radio map depends on: workspace, AP/IRS
/// geometry, radio parameters and obstacles. Mission fields (K, speeds,
/// energy coefficients, endpoints, r_min) are excluded.
std::string canonical_text(const Scenario& scenario);

/// 64-bit FNV-1a of canonical_text().
std::uint64_t scenario_hash(const Scenario& scenario);

std::string hex64(std::uint64_t v);

} // namespace irsplan

#endif // IRSPLAN__SCENARIO_HPP
