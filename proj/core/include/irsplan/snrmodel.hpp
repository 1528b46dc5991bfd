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

#ifndef IRSPLAN__SNRMODEL_HPP
#define IRSPLAN__SNRMODEL_HPP

#include <irsplan/config.hpp>
#include <irsplan/error.hpp>
#include <irsplan/radiomap.hpp>
#include <irsplan/scenario.hpp>

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace irsplan {

/// Parameters of
///   SNR(d_a, d_i) = (A d_i^-nu + B d_i^-nu/2 d_a^-mu/2 + C d_a^-mu) p_t / sigma^2
/// for one LOS/NLOS class. All five parameters are nonnegative.
struct ClassModel
{
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double nu = 2.0;
  double mu = 2.0;

  // Fit diagnostics.
  double residual_norm = 0.0;
  int points = 0;
  int iterations = 0;
  std::optional<int> inherited_from;

  friend bool operator==(const ClassModel&, const ClassModel&) = default;
};

class SnrModel
{
public:
  SnrModel() = default;
  SnrModel(FitMode mode, std::array<ClassModel, kClassCount> classes);

  /// The same parameters for every class.
  static SnrModel uniform(const ClassModel& m);

  FitMode mode() const { return _mode; }
  const ClassModel& at(LosClass cls) const { return _classes[cls.index()]; }
  const ClassModel& at(int index) const { return _classes.at(index); }
  const std::array<ClassModel, kClassCount>& classes() const { return _classes; }

  std::uint64_t scenario_hash = 0;

  friend bool operator==(const SnrModel&, const SnrModel&) = default;

private:
  FitMode _mode = FitMode::Global;
  std::array<ClassModel, kClassCount> _classes{};
};

/// Per-slot rate derivatives with respect to (d_a, d_i), in bits/s per meter.
struct RateGradient
{
  double d_a = 0.0;
  double d_i = 0.0;
};

//==============================================================================
// Model evaluation. Every function throws Error(Domain) on nonpositive
// distances.

/// The linear gain polynomial (A d_i^-nu + ...) without the p_t / sigma^2 factor.
double snr_gain(const ClassModel& m, double d_a, double d_i);

double snr_hat(const ClassModel& m, double d_a, double d_i, const Scenario& s);
double snr_hat(
  const SnrModel& model, LosClass cls, double d_a, double d_i, const Scenario& s);

/// B_w log2(1 + snr_hat).
double slot_rate(const ClassModel& m, double d_a, double d_i, const Scenario& s);

RateGradient rate_gradient(
  const ClassModel& m, double d_a, double d_i, const Scenario& s);

/// Hessian of the slot rate in (d_a, d_i) order.
Eigen::Matrix2d rate_hessian_distances(
  const ClassModel& m, double d_a, double d_i, const Scenario& s);

/// Average rate (1/K) sum_{k=0..K} B_w log2(1 + snr_hat_k).
double rate(
  const SnrModel& model,
  std::span<const LosClass> class_per_slot,
  std::span<const Position> traj,
  const Scenario& s);

/// Same, with each slot's class taken from the scenario geometry.
double rate(
  const SnrModel& model,
  std::span<const Position> traj,
  const Scenario& s);

std::vector<LosClass> slot_classes(
  std::span<const Position> traj, const Scenario& s);

//==============================================================================
/// First-order expansion of each slot rate in the distances around an
/// expansion trajectory:
///   r_app,k(q) = value_k + g_a,k (d_a(q) - d_a0,k) + g_i,k (d_i(q) - d_i0,k).
class RateLinearization
{
public:
  struct Slot
  {
    double d_a0 = 0.0;
    double d_i0 = 0.0;
    double value = 0.0; ///< bits/s at the expansion point
    RateGradient grad;
    LosClass cls;
  };

  RateLinearization(std::vector<Slot> slots, int K);

  const std::vector<Slot>& slots() const { return _slots; }
  int K() const { return _K; }

  double slot_value(std::size_t k, const Position& q, const Scenario& s) const;

  /// (1/K) sum_k r_app,k(q_k).
  double average(std::span<const Position> traj, const Scenario& s) const;

  Eigen::Vector2d position_gradient(
    std::size_t k, const Position& q, const Scenario& s) const;
  Eigen::Matrix2d position_hessian(
    std::size_t k, const Position& q, const Scenario& s) const;

private:
  std::vector<Slot> _slots;
  int _K;
};

RateLinearization linearize_rate(
  const SnrModel& model,
  std::span<const LosClass> class_per_slot,
  std::span<const Position> expansion_traj,
  const Scenario& s);

//==============================================================================
// Fitting.

struct FitPoint
{
  double d_a;
  double d_i;
  double snr; ///< linear, includes p_t / sigma^2
};

/// Thrown when the least-squares iteration fails to converge; carries the
/// best parameters seen.
class FitError : public Error
{
public:
  FitError(const std::string& what, ClassModel best);
  const ClassModel& best() const { return _best; }

private:
  ClassModel _best;
};

/// Fits one class: minimizes sum (log(1 + model) - log(1 + snr))^2 over
/// nonnegative parameters. With `irs_terms == false`, A and B are held at 0.
ClassModel fit_points(
  std::span<const FitPoint> points,
  double nominal_nu,
  double nominal_mu,
  bool irs_terms,
  const Scenario& s,
  const FitSettings& settings);

/// Fits the map per class (or globally, per settings.mode).
SnrModel fit(const RadioMap& map, const Scenario& s, const FitSettings& settings);

inline constexpr int kSnrModelVersion = 1;

std::string serialize_model(const SnrModel& model);
SnrModel parse_model(const std::string& text, const std::string& source_name);
void save_model(const SnrModel& model, const std::string& path);
SnrModel load_model(const std::string& path);

} // namespace irsplan

#endif // IRSPLAN__SNRMODEL_HPP
