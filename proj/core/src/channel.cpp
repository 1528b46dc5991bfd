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

#include <irsplan/channel.hpp>

#include <irsplan/error.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace irsplan {

namespace {

Eigen::VectorXcd gaussian_vector(
  int n, std::mt19937_64& rng, std::normal_distribution<double>& normal)
{
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i)
  {
    const double re = normal(rng);
    const double im = normal(rng);
    v[i] = {re, im};
  }
  return v;
}

double wrap_phase(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = a;
  if (r < 0.0 || r >= two_pi)
  {
    r = std::fmod(r, two_pi);
    if (r < 0.0)
      r += two_pi;
  }
  if (r >= two_pi)
    r = 0.0;
  return r;
}

} // namespace

//==============================================================================
Eigen::RowVectorXcd effective_channel(
  const ChannelDraw& d,
  const Eigen::VectorXd& phases)
{
  Eigen::RowVectorXcd e = d.h_d.adjoint();
  if (d.M() == 0)
    return e;

  // G is rank one, so h_r^H Phi G = sqrt(NM) gamma (h_r^H Phi a~) b~^T.
  std::complex<double> s = 0.0;
  for (int m = 0; m < d.M(); ++m)
    s += std::conj(d.h_r[m]) * std::polar(1.0, phases[m]) * d.a_tilde[m];
  const double nm = static_cast<double>(d.N()) * d.M();
  e += (std::sqrt(nm) * d.gamma * s) * d.b_tilde.transpose();
  return e;
}

//==============================================================================
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

//==============================================================================
Eigen::VectorXcd ula_response(int n_elements, double sin_angle)
{
  Eigen::VectorXcd v(n_elements);
  if (n_elements == 0)
    return v;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_elements));
  for (int n = 0; n < n_elements; ++n)
    v[n] = std::polar(scale, std::numbers::pi * n * sin_angle);
  return v;
}

//==============================================================================
ChannelDraw draw_channel(
  const Position& q,
  const Scenario& s,
  LosClass cls,
  std::uint64_t rng_seed)
{
  ChannelDraw d;
  const Distances dist = distances(q, s);
  d.d_a = dist.ap;
  d.d_i = dist.irs;
  d.nu = s.exponent(cls.irs);
  d.mu = s.exponent(cls.ap);

  const int M = s.m_elements;
  const int N = s.n_antennas;
  FadingStream(rng_seed).next(d, s);

  const double d_ia = s.irs_ap_distance();
  d.gamma = std::sqrt(s.rho / (d_ia * d_ia));
  const double sin_irs = (s.ap_pos.x() - s.irs_pos.x()) / d_ia;
  const double sin_ap = (s.irs_pos.x() - s.ap_pos.x()) / d_ia;
  d.a_tilde = ula_response(M, sin_irs);
  d.b_tilde = ula_response(N, sin_ap);
  return d;
}

FadingStream::FadingStream(std::uint64_t seed)
: _direct(mix_seed(seed, 1)),
  _irs(mix_seed(seed, 2)),
  _direct_normal(0.0, std::sqrt(0.5)),
  _irs_normal(0.0, std::sqrt(0.5))
{
}

void FadingStream::next(ChannelDraw& d, const Scenario& s)
{
  d.h_d_tilde = gaussian_vector(s.n_antennas, _direct, _direct_normal);
  d.h_r_tilde = gaussian_vector(s.m_elements, _irs, _irs_normal);
  d.h_d = std::sqrt(s.rho * std::pow(d.d_a, -d.mu)) * d.h_d_tilde;
  d.h_r = std::sqrt(s.rho * std::pow(d.d_i, -d.nu)) * d.h_r_tilde;
}

//==============================================================================
Eigen::MatrixXcd irs_ap_channel(const ChannelDraw& d)
{
  const double nm = static_cast<double>(d.N()) * d.M();
  return std::sqrt(nm) * d.gamma * d.a_tilde * d.b_tilde.transpose();
}

//==============================================================================
Beamformer optimal_beamformer(const ChannelDraw& d)
{
  Beamformer bf;
  const int M = d.M();

  // Common phase that aligns the reflected path with the direct one.
  const std::complex<double> bh = d.b_tilde.transpose() * d.h_d_tilde;
  bf.global_phase = wrap_phase(-std::arg(bh));

  bf.phases.resize(M);
  for (int m = 0; m < M; ++m)
  {
    const std::complex<double> g = d.gamma * std::conj(d.h_r_tilde[m])
      * d.a_tilde[m];
    bf.phases[m] = wrap_phase(bf.global_phase - std::arg(g));
  }

  // Effective row channel e = h_r^H Phi G + h_d^H; the combiner is e^H / |e|.
  const Eigen::RowVectorXcd e = effective_channel(d, bf.phases);
  const double norm = e.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorKind::DegenerateChannel, "effective channel is zero");
  bf.combiner = e.adjoint() / norm;
  return bf;
}

//==============================================================================
double snr(const ChannelDraw& d, const Beamformer& bf, const Scenario& s)
{
  const std::complex<double> y =
    (effective_channel(d, bf.phases) * bf.combiner)(0);
  return std::norm(y) * s.snr_scale();
}

double optimal_snr(const ChannelDraw& d, const Scenario& s)
{
  const std::complex<double> bh = d.b_tilde.transpose() * d.h_d_tilde;
  Eigen::RowVectorXcd e = d.h_d.adjoint();
  if (d.M() > 0)
  {
    // exp(j theta_m) of the optimal phases, formed without trigonometry:
    // exp(j (alpha - arg g_m)) = exp(j alpha) conj(g_m) / |g_m|.
    const double abs_bh = std::abs(bh);
    const std::complex<double> align = abs_bh > 0.0 ? std::conj(bh) / abs_bh : 1.0;
    std::complex<double> acc = 0.0;
    for (int m = 0; m < d.M(); ++m)
    {
      const std::complex<double> g = d.gamma * std::conj(d.h_r_tilde[m]) * d.a_tilde[m];
      const double ag = std::abs(g);
      const std::complex<double> phasor = ag > 0.0 ? align * std::conj(g) / ag : align;
      acc += std::conj(d.h_r[m]) * phasor * d.a_tilde[m];
    }
    const double nm = static_cast<double>(d.N()) * d.M();
    e += (std::sqrt(nm) * d.gamma * acc) * d.b_tilde.transpose();
  }
  const double power = e.squaredNorm();
  if (!(power > 0.0) || !std::isfinite(power))
    throw Error(ErrorKind::DegenerateChannel, "effective channel is zero");
  return power * s.snr_scale();
}

//==============================================================================
SnrTerms closed_form_terms(const ChannelDraw& d, const Scenario& s)
{
  SnrTerms t;
  const double n = static_cast<double>(d.N());
  t.C = s.rho * d.h_d_tilde.squaredNorm();
  if (d.M() == 0)
    return t;

  const double l1 = d.h_r_tilde.cwiseAbs().sum();
  const double g = std::abs(d.gamma);
  const double bh = std::abs(std::complex<double>(d.b_tilde.transpose() * d.h_d_tilde));
  t.A = n * s.rho * g * g * l1 * l1;
  t.B = 2.0 * std::sqrt(n) * s.rho * g * l1 * bh;
  return t;
}

//==============================================================================
double optimal_snr_closed_form(
  const ChannelDraw& d,
  double d_a,
  double d_i,
  const Scenario& s)
{
  if (!(d_a > 0.0) || !(d_i > 0.0))
    throw Error(ErrorKind::Domain, "distances must be > 0");
  const SnrTerms t = closed_form_terms(d, s);
  const double v = t.A * std::pow(d_i, -d.nu)
    + t.B * std::pow(d_i, -0.5 * d.nu) * std::pow(d_a, -0.5 * d.mu)
    + t.C * std::pow(d_a, -d.mu);
  return v * s.snr_scale();
}

} // namespace irsplan
