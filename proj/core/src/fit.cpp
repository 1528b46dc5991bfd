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

#include <irsplan/snrmodel.hpp>

#include <irsplan/error.hpp>
#include <irsplan/log.hpp>
#include <irsplan/textio.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace irsplan {

namespace {

// Free-variable layout: value_i = scale_i * p_i^2.
enum Param { kA = 0, kB = 1, kC = 2, kNu = 3, kMu = 4, kParams = 5 };

constexpr double kExponentMin = 1.5;
constexpr double kExponentMax = 6.0;

struct Parameterization
{
  std::array<double, kParams> scale{};
  std::array<bool, kParams> active{};

  ClassModel model(const Eigen::VectorXd& p, const std::vector<int>& idx) const
  {
    std::array<double, kParams> v{};
    for (std::size_t j = 0; j < idx.size(); ++j)
      v[idx[j]] = scale[idx[j]] * p[static_cast<Eigen::Index>(j)]
        * p[static_cast<Eigen::Index>(j)];
    ClassModel m;
    m.A = v[kA];
    m.B = v[kB];
    m.C = v[kC];
    m.nu = v[kNu];
    m.mu = v[kMu];
    return m;
  }
};

double cost_of(
  const ClassModel& m,
  std::span<const FitPoint> pts,
  double kappa,
  Eigen::VectorXd* residuals)
{
  double c = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j)
  {
    const double model = kappa * snr_gain(m, pts[j].d_a, pts[j].d_i);
    const double r = std::log1p(model) - std::log1p(pts[j].snr);
    if (residuals)
      (*residuals)[static_cast<Eigen::Index>(j)] = r;
    c += r * r;
  }
  return c;
}

/// Nonnegative least squares for <= 3 unknowns by enumerating supports.
Eigen::Vector3d nnls3(
  const Eigen::MatrixXd& X,
  const Eigen::VectorXd& y,
  const std::array<bool, 3>& allowed)
{
  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  double best_res = y.squaredNorm();
  for (int mask = 1; mask < 8; ++mask)
  {
    std::vector<int> cols;
    bool ok = true;
    for (int c = 0; c < 3; ++c)
    {
      if (mask & (1 << c))
      {
        ok = ok && allowed[c];
        cols.push_back(c);
      }
    }
    if (!ok)
      continue;
    Eigen::MatrixXd Xs(X.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
      Xs.col(static_cast<Eigen::Index>(j)) = X.col(cols[j]);
    const Eigen::VectorXd sol = Xs.colPivHouseholderQr().solve(y);
    if (!sol.allFinite() || (sol.array() < 0.0).any())
      continue;
    const double res = (Xs * sol - y).squaredNorm();
    if (res < best_res)
    {
      best_res = res;
      best.setZero();
      for (std::size_t j = 0; j < cols.size(); ++j)
        best[cols[j]] = sol[static_cast<Eigen::Index>(j)];
    }
  }
  return best;
}

} // namespace

//==============================================================================
ClassModel fit_points(
  std::span<const FitPoint> points,
  double nominal_nu,
  double nominal_mu,
  bool irs_terms,
  const Scenario& s,
  const FitSettings& settings)
{
  ClassModel out;
  out.nu = nominal_nu;
  out.mu = nominal_mu;
  out.points = static_cast<int>(points.size());

  const bool all_zero = std::all_of(points.begin(), points.end(),
      [](const FitPoint& p) { return p.snr == 0.0; });
  if (points.empty() || all_zero)
    return out;

  for (const auto& p : points)
  {
    if (!(p.d_a > 0.0) || !(p.d_i > 0.0) || !(p.snr >= 0.0))
      throw Error(ErrorKind::Domain, "fit points need d > 0 and snr >= 0");
  }

  const double kappa = s.snr_scale();

  // Warm start: exponents at their nominal values, gains from a relative
  // nonnegative linear least-squares solve.
  std::vector<std::size_t> rows;
  for (std::size_t j = 0; j < points.size(); ++j)
    if (points[j].snr > 0.0)
      rows.push_back(j);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 3);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
  {
    const FitPoint& p = points[rows[r]];
    const double w = kappa / p.snr;
    const auto i = static_cast<Eigen::Index>(r);
    X(i, 0) = w * std::pow(p.d_i, -nominal_nu);
    X(i, 1) = w * std::pow(p.d_i, -0.5 * nominal_nu) * std::pow(p.d_a, -0.5 * nominal_mu);
    X(i, 2) = w * std::pow(p.d_a, -nominal_mu);
  }
  const Eigen::Vector3d warm = nnls3(X, y, {irs_terms, irs_terms, true});

  Parameterization par;
  std::vector<int> idx;
  Eigen::VectorXd p0(kParams);
  // Gains enter as squares; an exact zero is a stationary point, so zero
  // warm values start slightly positive.
  const double seed_gain = 1e-3 * std::max(warm.maxCoeff(), 1e-300);
  auto add = [&](int which, double value)
    {
      par.active[which] = true;
      par.scale[which] = value > 0.0 ? value : seed_gain;
      p0[static_cast<Eigen::Index>(idx.size())] = 1.0;
      idx.push_back(which);
    };
  if (irs_terms)
  {
    add(kA, warm[0]);
    add(kB, warm[1]);
  }
  add(kC, warm[2]);
  if (irs_terms)
    add(kNu, nominal_nu);
  add(kMu, nominal_mu);
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::VectorXd p = p0.head(n);

  const auto m_pts = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd res(m_pts);
  Eigen::MatrixXd J(m_pts, n);

  auto jacobian = [&](const Eigen::VectorXd& pv)
    {
      const ClassModel m = par.model(pv, idx);
      for (Eigen::Index j = 0; j < m_pts; ++j)
      {
        const FitPoint& pt = points[static_cast<std::size_t>(j)];
        const double ln_i = std::log(pt.d_i);
        const double ln_a = std::log(pt.d_a);
        const double fa = std::pow(pt.d_i, -m.nu);
        const double fb = std::pow(pt.d_i, -0.5 * m.nu) * std::pow(pt.d_a, -0.5 * m.mu);
        const double fc = std::pow(pt.d_a, -m.mu);
        const double S = m.A * fa + m.B * fb + m.C * fc;
        const double outer = kappa / (1.0 + kappa * S);
        for (Eigen::Index c = 0; c < n; ++c)
        {
          const int which = idx[static_cast<std::size_t>(c)];
          double dS = 0.0;
          switch (which)
          {
            case kA: dS = fa; break;
            case kB: dS = fb; break;
            case kC: dS = fc; break;
            case kNu: dS = -ln_i * (m.A * fa + 0.5 * m.B * fb); break;
            case kMu: dS = -ln_a * (0.5 * m.B * fb + m.C * fc); break;
            default: break;
          }
          J(j, c) = outer * dS * 2.0 * par.scale[which] * pv[c];
        }
      }
    };

  auto is_gain = [&](Eigen::Index c)
    {
      const int which = idx[static_cast<std::size_t>(c)];
      return which == kA || which == kB || which == kC;
    };

  auto term = [](const ClassModel& m, int which, const FitPoint& pt)
    {
      if (which == kA)
        return m.A * std::pow(pt.d_i, -m.nu);
      if (which == kB)
        return m.B * std::pow(pt.d_i, -0.5 * m.nu) * std::pow(pt.d_a, -0.5 * m.mu);
      return m.C * std::pow(pt.d_a, -m.mu);
    };

  // A gain whose term never exceeds 1e-6 of the modeled SNR is pinned at zero.
  auto pin_collapsed_gains = [&]()
    {
      const ClassModel m = par.model(p, idx);
      bool pinned = false;
      for (Eigen::Index c = 0; c < n; ++c)
      {
        if (!is_gain(c) || p[c] == 0.0)
          continue;
        const int which = idx[static_cast<std::size_t>(c)];
        double share = 0.0;
        for (const FitPoint& pt : points)
        {
          const double S = snr_gain(m, pt.d_a, pt.d_i);
          if (S > 0.0)
            share = std::max(share, term(m, which, pt) / S);
        }
        if (share < 1e-6)
        {
          p[c] = 0.0;
          pinned = true;
        }
      }
      return pinned;
    };

  // Releases a pinned gain whose cost derivative is negative.
  auto reseed_pinned_gains = [&]()
    {
      const ClassModel m = par.model(p, idx);
      bool released = false;
      for (Eigen::Index c = 0; c < n; ++c)
      {
        if (!is_gain(c) || p[c] != 0.0)
          continue;
        const int which = idx[static_cast<std::size_t>(c)];
        double slope = 0.0;
        for (Eigen::Index j = 0; j < m_pts; ++j)
        {
          const FitPoint& pt = points[static_cast<std::size_t>(j)];
          const double S = snr_gain(m, pt.d_a, pt.d_i);
          ClassModel unit = m;
          unit.A = unit.B = unit.C = 1.0;
          const double dS = term(unit, which, pt);
          slope += res[j] * kappa / (1.0 + kappa * S) * dS;
        }
        if (slope < 0.0)
        {
          p[c] = 1e-2;
          released = true;
        }
      }
      return released;
    };
  constexpr int kMaxReseeds = 3;
  int reseeds = 0;

  double cost = cost_of(par.model(p, idx), points, kappa, &res);
  double lambda = -1.0;
  int it = 0;
  bool converged = false;
  int flat_steps = 0;

  // Box on the exponents, in the squared coordinates.
  Eigen::VectorXd p_lo = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  Eigen::VectorXd p_hi = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (Eigen::Index c = 0; c < n; ++c)
  {
    const int which = idx[static_cast<std::size_t>(c)];
    if (which == kNu || which == kMu)
    {
      p_lo[c] = std::sqrt(kExponentMin / par.scale[which]);
      p_hi[c] = std::sqrt(kExponentMax / par.scale[which]);
    }
  }

  for (; it < settings.max_iterations; ++it)
  {
    jacobian(p);
    Eigen::VectorXd g = J.transpose() * res;
    // Coordinates held at a bound by the gradient leave the system.
    std::vector<bool> held(static_cast<std::size_t>(n), false);
    for (Eigen::Index c = 0; c < n; ++c)
    {
      if ((p[c] <= p_lo[c] && g[c] > 0.0) || (p[c] >= p_hi[c] && g[c] < 0.0))
      {
        held[static_cast<std::size_t>(c)] = true;
        g[c] = 0.0;
        J.col(c).setZero();
      }
    }
    if (g.lpNorm<Eigen::Infinity>() <= settings.gradient_tol)
    {
      converged = true;
      break;
    }
    Eigen::MatrixXd JtJ = J.transpose() * J;
    for (Eigen::Index c = 0; c < n; ++c)
      if (held[static_cast<std::size_t>(c)])
        JtJ(c, c) = 1.0;
    Eigen::VectorXd diag = JtJ.diagonal();
    const double max_diag = std::max(diag.maxCoeff(), 1e-300);
    diag = diag.cwiseMax(1e-12 * max_diag);
    if (lambda < 0.0)
      lambda = 1e-3;

    bool improved = false;
    for (int inner = 0; inner < 50; ++inner)
    {
      Eigen::MatrixXd Hm = JtJ;
      Hm.diagonal() += lambda * diag;
      const Eigen::VectorXd step = Hm.ldlt().solve(-g);
      const Eigen::VectorXd trial = (p + step).cwiseMax(p_lo).cwiseMin(p_hi);
      Eigen::VectorXd trial_res(m_pts);
      const double trial_cost =
        cost_of(par.model(trial, idx), points, kappa, &trial_res);
      if (std::isfinite(trial_cost) && trial_cost <= cost)
      {
        const double rel_drop = (cost - trial_cost) / std::max(cost, 1e-300);
        const double rel_step = step.norm() / (p.norm() + 1e-12);
        p = trial;
        res = trial_res;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        flat_steps = (rel_drop < 1e-14 || rel_step < 1e-12) ? flat_steps + 1 : 0;
        if (pin_collapsed_gains())
          cost = cost_of(par.model(p, idx), points, kappa, &res);
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e16)
        break;
    }
    if (!improved || flat_steps >= 3 || cost == 0.0)
    {
      if (reseeds < kMaxReseeds && reseed_pinned_gains())
      {
        ++reseeds;
        flat_steps = 0;
        lambda = -1.0;
        cost = cost_of(par.model(p, idx), points, kappa, &res);
        continue;
      }
      converged = true;
      ++it;
      break;
    }
  }

  ClassModel fitted = par.model(p, idx);
  fitted.nu = std::clamp(fitted.nu, kExponentMin, kExponentMax);
  fitted.mu = std::clamp(fitted.mu, kExponentMin, kExponentMax);
  if (!irs_terms)
    fitted.nu = nominal_nu;
  fitted.points = out.points;
  fitted.iterations = it;
  fitted.residual_norm = std::sqrt(cost);
  if (!converged)
    throw FitError("no convergence after " + std::to_string(it)
        + " iterations (residual " + format_double(fitted.residual_norm) + ")",
        fitted);
  return fitted;
}

//==============================================================================
SnrModel fit(const RadioMap& map, const Scenario& s, const FitSettings& settings)
{
  const bool irs_terms = s.m_elements > 0;
  std::array<std::vector<FitPoint>, kClassCount> per_class;
  std::vector<FitPoint> all;

  for (int iy = 0; iy < map.ny(); ++iy)
  {
    for (int ix = 0; ix < map.nx(); ++ix)
    {
      const Position q = map.center(ix, iy);
      // Cells whose center lies inside an obstacle footprint are unreachable.
      if (min_obstacle_margin(q, s) < 1.0)
        continue;
      const MapCell& cell = map.at(ix, iy);
      const Distances d = distances(q, s);
      const FitPoint pt{d.ap, d.irs, cell.avg_opt_snr};
      per_class[cell.cls().index()].push_back(pt);
      all.push_back(pt);
    }
  }

  std::array<ClassModel, kClassCount> models;

  if (settings.mode == FitMode::Global)
  {
    const ClassModel m = fit_points(
      all, s.los_exponent, s.los_exponent, irs_terms, s, settings);
    models.fill(m);
    SnrModel out(FitMode::Global, models);
    out.scenario_hash = map.scenario_hash();
    return out;
  }

  std::array<bool, kClassCount> populated{};
  for (int c = 0; c < kClassCount; ++c)
  {
    if (static_cast<int>(per_class[c].size()) < settings.min_cells)
      continue;
    const LosClass cls = LosClass::from_index(c);
    models[c] = fit_points(per_class[c], s.exponent(cls.irs),
        s.exponent(cls.ap), irs_terms, s, settings);
    populated[c] = true;
  }

  if (std::none_of(populated.begin(), populated.end(), [](bool b) { return b; }))
    throw Error(ErrorKind::FitFailure,
        "no LOS/NLOS class has at least " + std::to_string(settings.min_cells)
        + " map cells");

  for (int c = 0; c < kClassCount; ++c)
  {
    if (populated[c])
      continue;
    // Nearest populated class: fewest differing links, AP link kept first.
    const LosClass cls = LosClass::from_index(c);
    int best = -1;
    int best_key = std::numeric_limits<int>::max();
    for (int o = 0; o < kClassCount; ++o)
    {
      if (!populated[o])
        continue;
      const LosClass other = LosClass::from_index(o);
      const int key = 4 * (other.ap != cls.ap) + 2 * (other.irs != cls.irs) + o;
      const int hamming = (other.ap != cls.ap) + (other.irs != cls.irs);
      const int rank = hamming * 16 + key;
      if (rank < best_key)
      {
        best_key = rank;
        best = o;
      }
    }
    models[c] = models[best];
    models[c].points = static_cast<int>(per_class[c].size());
    models[c].inherited_from = best;
    log(LogLevel::Warning,
      "class " + cls.label() + " has " + std::to_string(per_class[c].size())
      + " map cells; inheriting the fit of " + LosClass::from_index(best).label());
  }

  SnrModel out(FitMode::PerClass, models);
  out.scenario_hash = map.scenario_hash();
  return out;
}

} // namespace irsplan
