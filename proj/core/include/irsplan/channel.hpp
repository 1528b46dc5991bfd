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

#ifndef IRSPLAN__CHANNEL_HPP
#define IRSPLAN__CHANNEL_HPP

#include <irsplan/scenario.hpp>

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace irsplan {

/// One small-scale fading realization seen from a robot position.
struct ChannelDraw
{
  Eigen::VectorXcd h_r_tilde; ///< robot -> IRS fading, length M
  Eigen::VectorXcd h_d_tilde; ///< robot -> AP fading, length N
  Eigen::VectorXcd h_r;       ///< path-loss scaled, length M
  Eigen::VectorXcd h_d;       ///< path-loss scaled, length N
  Eigen::VectorXcd a_tilde;   ///< IRS array response, unit norm
  Eigen::VectorXcd b_tilde;   ///< AP array response, unit norm
  std::complex<double> gamma; ///< IRS -> AP gain sqrt(rho / d_ia^2)
  double d_a = 0.0;
  double d_i = 0.0;
  double nu = 0.0;            ///< robot -> IRS path-loss exponent
  double mu = 0.0;            ///< robot -> AP path-loss exponent

  int M() const { return static_cast<int>(h_r.size()); }
  int N() const { return static_cast<int>(h_d.size()); }
};

/// IRS phase configuration plus AP combiner.
struct Beamformer
{
  Eigen::VectorXd phases;      ///< theta_m in [0, 2 pi)
  Eigen::VectorXcd combiner;   ///< w, ||w|| <= 1
  double global_phase = 0.0;   ///< alpha
};

/// The per-draw constants of the optimal SNR,
///   SNR* = (A d_i^-nu + B d_i^-nu/2 d_a^-mu/2 + C d_a^-mu) p_t / sigma^2.
struct SnrTerms
{
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
};

/// SplitMix64 finalizer over (a, b); used to derive independent streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Half-wavelength uniform linear array response with entries
/// exp(j pi n sin_angle) / sqrt(n_elements).
Eigen::VectorXcd ula_response(int n_elements, double sin_angle);

/// Draws h_r and h_d (i.i.d. CN(0, 1) scaled by the class path loss) for
/// position q. The direct and IRS fading come from separate streams so draws
/// with the same seed share h_d across different M.
ChannelDraw draw_channel(
  const Position& q,
  const Scenario& scenario,
  LosClass cls,
  std::uint64_t rng_seed);

/// G = sqrt(N M) gamma a~ b~^T  (M x N).
Eigen::MatrixXcd irs_ap_channel(const ChannelDraw& draw);

/// Row vector h_r^H Phi G + h_d^H for the IRS phases `phases`.
Eigen::RowVectorXcd effective_channel(
  const ChannelDraw& draw,
  const Eigen::VectorXd& phases);

/// Closed-form joint IRS phase / AP combiner. Throws DegenerateChannel when
/// the effective channel vanishes.
Beamformer optimal_beamformer(const ChannelDraw& draw);

/// |(h_r^H Phi G + h_d^H) w|^2 p_t / sigma^2.
double snr(const ChannelDraw& draw, const Beamformer& bf, const Scenario& scenario);

/// Successive fading realizations for one position: separate engines for
/// the direct (stream 1) and IRS (stream 2) links. The first realization of
/// FadingStream(seed) equals draw_channel(.., seed).
class FadingStream
{
public:
  explicit FadingStream(std::uint64_t seed);

  /// Overwrites the fading and path-loss scaled channels of `draw`.
  void next(ChannelDraw& draw, const Scenario& scenario);

private:
  std::mt19937_64 _direct;
  std::mt19937_64 _irs;
  std::normal_distribution<double> _direct_normal;
  std::normal_distribution<double> _irs_normal;
};

/// SNR under optimal_beamformer(); with w = e^H / |e| the received
/// amplitude is |e|, so this is |e|^2 p_t / sigma^2.
double optimal_snr(const ChannelDraw& draw, const Scenario& scenario);

SnrTerms closed_form_terms(const ChannelDraw& draw, const Scenario& scenario);

/// Optimal SNR from the draw statistics evaluated at distances (d_a, d_i)
/// with the draw's path-loss exponents.
double optimal_snr_closed_form(
  const ChannelDraw& draw,
  double d_a,
  double d_i,
  const Scenario& scenario);

} // namespace irsplan

#endif // IRSPLAN__CHANNEL_HPP
