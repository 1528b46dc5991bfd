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

#ifndef IRSPLAN_TESTS__TESTING_HPP
#define IRSPLAN_TESTS__TESTING_HPP

#include <irsplan/channel.hpp>
#include <irsplan/p4.hpp>
#include <irsplan/scenario.hpp>
#include <irsplan/snrmodel.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace irsplan::oracle {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("irsplan-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double rel_diff(double a, double b)
{
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

/// Scenario without obstacles on a small workspace; handy for planner tests.
inline Scenario open_scenario()
{
  Scenario s;
  s.obstacles.clear();
  s.r_min = 0.0;
  return s;
}

/// Model with only the direct term: SNR = C d_a^-2 p/sigma^2 for every class.
inline SnrModel direct_only_model(double C = 2.5e-6)
{
  ClassModel m;
  m.C = C;
  m.nu = 2.0;
  m.mu = 2.0;
  return SnrModel::uniform(m);
}

/// Class model of E[optimal SNR] under i.i.d. CN(0, 1) fading:
/// |e|^2 = |h_d|^2 + X^2 + 2 X |b~^T h_d| with X = sqrt(N) |gamma| sum_m |h_r,m|,
/// and for Rayleigh |h|: E|h| = sqrt(pi)/2, E|h|^2 = 1.
inline ClassModel expected_gains(const Scenario& s, double nu, double mu)
{
  const double pi = std::numbers::pi;
  const double N = s.n_antennas;
  const double M = s.m_elements;
  const double dia = s.irs_ap_distance();
  const double g2 = s.rho / (dia * dia);
  ClassModel m;
  m.A = N * g2 * s.rho * (M + M * (M - 1.0) * pi / 4.0);
  m.B = 2.0 * std::sqrt(N * g2) * s.rho * M * pi / 4.0;
  m.C = N * s.rho;
  m.nu = nu;
  m.mu = mu;
  return m;
}

/// Linear SNR of a class model, written out independently of the library.
inline double snr_of(const ClassModel& m, double da, double di, const Scenario& s)
{
  return s.p_t / s.noise_power * (m.A * std::pow(di, -m.nu)
    + m.B * std::pow(di, -0.5 * m.nu) * std::pow(da, -0.5 * m.mu)
    + m.C * std::pow(da, -m.mu));
}

//==============================================================================
// Beamforming oracle.

/// Best |h_r^H Phi G + h_d^H|^2 p/sigma^2 over every IRS phase vector whose
/// entries lie on a `levels`-point uniform grid. Evaluates the received row
/// vector directly from the full M x N channel matrix (no rank-one shortcut);
/// the combiner maximizing |e w| for fixed phases is e^H/|e|, so the SNR of a
/// phase vector is |e|^2 p/sigma^2.
inline double grid_best_snr(const ChannelDraw& d, const Scenario& s, int levels)
{
  const int M = d.M();
  const int N = d.N();
  constexpr int kMaxN = 8;
  using Row = std::array<std::complex<double>, kMaxN>;
  if (N > kMaxN)
    throw std::invalid_argument("grid oracle supports N <= 8");

  const Eigen::MatrixXcd G = irs_ap_channel(d);
  std::vector<Row> u(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < N; ++n)
      u[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] =
        std::conj(d.h_r[m]) * G(m, n);

  std::vector<std::complex<double>> phasor(static_cast<std::size_t>(levels));
  for (int l = 0; l < levels; ++l)
    phasor[static_cast<std::size_t>(l)] =
      std::polar(1.0, 2.0 * std::numbers::pi * l / levels);

  Row base{};
  for (int n = 0; n < N; ++n)
    base[static_cast<std::size_t>(n)] = std::conj(d.h_d[n]);

  double best = 0.0;
  std::vector<Row> partial(static_cast<std::size_t>(M) + 1);
  partial[0] = base;
  std::function<void(int)> rec = [&](int m)
    {
      const Row& acc = partial[static_cast<std::size_t>(m)];
      if (m == M)
      {
        double p = 0.0;
        for (int n = 0; n < N; ++n)
          p += std::norm(acc[static_cast<std::size_t>(n)]);
        best = std::max(best, p);
        return;
      }
      Row& next = partial[static_cast<std::size_t>(m) + 1];
      const Row& um = u[static_cast<std::size_t>(m)];
      for (int l = 0; l < levels; ++l)
      {
        const std::complex<double> e = phasor[static_cast<std::size_t>(l)];
        for (int n = 0; n < N; ++n)
          next[static_cast<std::size_t>(n)] =
            acc[static_cast<std::size_t>(n)] + e * um[static_cast<std::size_t>(n)];
        rec(m + 1);
      }
    };
  rec(0);
  return best * s.p_t / s.noise_power;
}

//==============================================================================
// Finite differences.

template <class F>
double central_diff(F&& f, double x, double h)
{
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

//==============================================================================
// K = 2 subproblem oracle: exhaustive search over the single free waypoint.

struct GridOptimum
{
  bool feasible = false;
  double energy = std::numeric_limits<double>::infinity();
  Position q1;
  double resolution_bound = 0.0; ///< energy change over one grid diagonal
};

inline double my_slot_energy(double step, const Scenario& s)
{
  return s.c1 * step * step / s.delta_t + s.c2 * step + s.c3 * s.delta_t;
}

inline double my_distance(const Position& q, const Position& p, double dz)
{
  return std::sqrt((q - p).squaredNorm() + dz * dz);
}

/// Searches q_1 on a grid of spacing `h` aligned with prev[1]. Constraint
/// data come from the raw linearization values, evaluated here with
/// independent distance code.
inline GridOptimum grid_search_k2(
  const Scenario& s,
  const RateLinearization& lin,
  const std::vector<ObstacleLinearization>& cuts,
  const Trajectory& prev,
  double trust_radius,
  double h)
{
  GridOptimum out;
  const Position& qs = s.q_s;
  const Position& qd = s.q_d;
  const double dmax = s.v_max * s.delta_t;
  const auto& slots = lin.slots();

  auto rate_app = [&](std::size_t k, const Position& q)
    {
      const auto& sl = slots[k];
      const double da = my_distance(q, s.ap_pos, s.z_a - s.z_r);
      const double di = my_distance(q, s.irs_pos, s.z_i - s.z_r);
      return sl.value + sl.grad.d_a * (da - sl.d_a0) + sl.grad.d_i * (di - sl.d_i0);
    };
  const double fixed_rate = rate_app(0, qs) + rate_app(2, qd);

  const int n = static_cast<int>(std::ceil(trust_radius / h));
  for (int i = -n; i <= n; ++i)
  {
    for (int j = -n; j <= n; ++j)
    {
      const Position q = prev[1] + Position(i * h, j * h);
      if ((q - prev[1]).norm() > trust_radius)
        continue;
      const double a = (q - qs).norm();
      const double b = (qd - q).norm();
      if (a > dmax || b > dmax)
        continue;
      bool ok = true;
      for (const auto& c : cuts)
      {
        if (c.k != 1)
          continue;
        if (c.value + c.gradient.dot(q - c.anchor) < s.d_s)
        {
          ok = false;
          break;
        }
      }
      if (!ok)
        continue;
      if ((fixed_rate + rate_app(1, q)) / s.K < s.r_min)
        continue;
      const double e = my_slot_energy(a, s) + my_slot_energy(b, s);
      if (e < out.energy)
      {
        out.energy = e;
        out.q1 = q;
        out.feasible = true;
      }
    }
  }
  const double lipschitz = 2.0 * (2.0 * s.c1 * dmax / s.delta_t + s.c2);
  out.resolution_bound = lipschitz * h * std::sqrt(2.0);
  return out;
}

//==============================================================================
// Random K = 2 subproblems.

struct K2Instance
{
  Scenario scenario;
  SnrModel model;
  RateLinearization linearization;
  std::vector<ObstacleLinearization> cuts;
  Trajectory prev;
  double trust_radius = 1.0;
};

/// Start and goal up to 2 D_max apart, a feasible anchor for the free
/// waypoint, up to two random ellipses clear of the anchor and a rate floor
/// at or slightly below the anchor's linearized average.
inline K2Instance random_k2_instance(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pi = std::numbers::pi;
  Scenario s;
  s.K = 2;
  s.obstacles.clear();
  const double phi = 2.0 * pi * u(rng);
  const double len = 2.0 + 3.5 * u(rng);
  const Position dir(std::cos(phi), std::sin(phi));
  const Position normal(-dir.y(), dir.x());
  s.q_s = Position(15.0 + 20.0 * u(rng), 8.0 + 14.0 * u(rng));
  s.q_d = s.q_s + len * dir;
  const Position mid = 0.5 * (s.q_s + s.q_d);
  const Trajectory prev{s.q_s, mid + (2.0 * u(rng) - 1.0) * normal, s.q_d};

  const int n_obstacles = static_cast<int>(rng() % 3);
  while (static_cast<int>(s.obstacles.size()) < n_obstacles)
  {
    const Obstacle o = Obstacle::ellipse(
      mid + Position(8.0 * u(rng) - 4.0, 8.0 * u(rng) - 4.0),
      1.0 + 2.0 * u(rng), 1.0 + 2.0 * u(rng), 2.0, pi * u(rng));
    if (obstacle_margin(prev[1], o) >= s.d_s + 0.05
      && obstacle_margin(s.q_s, o) >= s.d_s && obstacle_margin(s.q_d, o) >= s.d_s)
      s.obstacles.push_back(o);
  }

  ClassModel m;
  m.A = 1e-6 * (0.5 + u(rng));
  m.B = 1e-6 * (0.5 + u(rng));
  m.C = 2.5e-6 * (0.5 + u(rng));
  m.nu = 2.0 + 0.5 * u(rng);
  m.mu = 2.0 + 0.5 * u(rng);
  const SnrModel model = SnrModel::uniform(m);
  const std::vector<LosClass> cls(3);
  RateLinearization lin = linearize_rate(model, cls, prev, s);
  const double avg = lin.average(prev, s);
  s.r_min = u(rng) < 0.5 ? avg : avg * (1.0 - 0.02 * u(rng));
  auto cuts = linearize_obstacles(prev, s.obstacles);
  return K2Instance{s, model, std::move(lin), std::move(cuts), prev, 1.0};
}

//==============================================================================
// Synthetic map points for fit recovery.

/// Noise-free points SNR = kappa * gain(d_a, d_i) over a grid of distance
/// pairs taken from the reference geometry.
inline std::vector<FitPoint> synthetic_points(
  const ClassModel& truth, const Scenario& s, int nx, int ny)
{
  std::vector<FitPoint> pts;
  const double kappa = s.p_t / s.noise_power;
  for (int iy = 0; iy < ny; ++iy)
  {
    for (int ix = 0; ix < nx; ++ix)
    {
      const Position q(
        s.workspace.x_min + (ix + 0.5) * s.workspace.width() / nx,
        s.workspace.y_min + (iy + 0.5) * s.workspace.height() / ny);
      const double da = my_distance(q, s.ap_pos, s.z_a - s.z_r);
      const double di = my_distance(q, s.irs_pos, s.z_i - s.z_r);
      const double g = truth.A * std::pow(di, -truth.nu)
        + truth.B * std::pow(di, -0.5 * truth.nu) * std::pow(da, -0.5 * truth.mu)
        + truth.C * std::pow(da, -truth.mu);
      pts.push_back({da, di, kappa * g});
    }
  }
  return pts;
}

/// Multiplies every point by the mean of `draws` unit exponentials, the
/// sampling spread of a `draws`-sample average of a Rayleigh power.
inline void add_draw_noise(std::vector<FitPoint>& pts, int draws, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  for (auto& p : pts)
  {
    double acc = 0.0;
    for (int j = 0; j < draws; ++j)
      acc += expo(rng);
    p.snr *= acc / draws;
  }
}

} // namespace irsplan::oracle

#endif // IRSPLAN_TESTS__TESTING_HPP
