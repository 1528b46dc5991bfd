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


#include <irsplan/socp.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace irsplan {

std::string_view to_string(SolveStatus status)
{
  switch (status)
  {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIterations: return "max-iter";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

double Residuals::max() const
{
  return std::max({primal, dual, gap});
}

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

//==============================================================================
// Product-cone algebra. Linear entries are their own 1-dimensional blocks.
class ConeOps
{
public:
  explicit ConeOps(const ConeDims& dims)
  : _dims(dims)
  {
    Index off = dims.linear;
    for (int q : dims.soc)
    {
      _soc_offset.push_back(off);
      off += q;
    }
    _m = off;
  }

  Index size() const { return _m; }
  int degree() const { return _dims.degree(); }
  int blocks() const { return static_cast<int>(_dims.soc.size()); }
  Index offset(int k) const { return _soc_offset[static_cast<std::size_t>(k)]; }
  Index block_size(int k) const { return _dims.soc[static_cast<std::size_t>(k)]; }
  int linear() const { return _dims.linear; }

  VectorXd identity() const
  {
    VectorXd e = VectorXd::Zero(_m);
    e.head(_dims.linear).setOnes();
    for (int k = 0; k < blocks(); ++k)
      e[offset(k)] = 1.0;
    return e;
  }

  /// Jordan product u o v.
  VectorXd product(const VectorXd& u, const VectorXd& v) const
  {
    VectorXd r(_m);
    const Index l = _dims.linear;
    r.head(l) = u.head(l).cwiseProduct(v.head(l));
    for (int k = 0; k < blocks(); ++k)
    {
      const Index o = offset(k);
      const Index n = block_size(k);
      r[o] = u.segment(o, n).dot(v.segment(o, n));
      if (n > 1)
        r.segment(o + 1, n - 1) = u[o] * v.segment(o + 1, n - 1)
          + v[o] * u.segment(o + 1, n - 1);
    }
    return r;
  }

  /// x such that lambda o x = u.
  VectorXd divide(const VectorXd& u, const VectorXd& lambda) const
  {
    VectorXd x(_m);
    const Index l = _dims.linear;
    x.head(l) = u.head(l).cwiseQuotient(lambda.head(l));
    for (int k = 0; k < blocks(); ++k)
    {
      const Index o = offset(k);
      const Index n = block_size(k);
      const double l0 = lambda[o];
      if (n == 1)
      {
        x[o] = u[o] / l0;
        continue;
      }
      const auto l1 = lambda.segment(o + 1, n - 1);
      const auto u1 = u.segment(o + 1, n - 1);
      const double det = l0 * l0 - l1.squaredNorm();
      const double x0 = (l0 * u[o] - l1.dot(u1)) / det;
      x[o] = x0;
      x.segment(o + 1, n - 1) = (u1 - x0 * l1) / l0;
    }
    return x;
  }

  /// Smallest t with v + t e in the cone (positive means v is outside).
  double max_violation(const VectorXd& v) const
  {
    double t = -kInf;
    for (Index i = 0; i < _dims.linear; ++i)
      t = std::max(t, -v[i]);
    for (int k = 0; k < blocks(); ++k)
    {
      const Index o = offset(k);
      const Index n = block_size(k);
      t = std::max(t, -v[o] + (n > 1 ? v.segment(o + 1, n - 1).norm() : 0.0));
    }
    return t;
  }

  /// Largest alpha with lambda + alpha * v in the cone (lambda interior).
  double max_step(const VectorXd& lambda, const VectorXd& v) const
  {
    double alpha = kInf;
    for (Index i = 0; i < _dims.linear; ++i)
      if (v[i] < 0.0)
        alpha = std::min(alpha, -lambda[i] / v[i]);
    for (int k = 0; k < blocks(); ++k)
    {
      const Index o = offset(k);
      const Index n = block_size(k);
      if (n == 1)
      {
        if (v[o] < 0.0)
          alpha = std::min(alpha, -lambda[o] / v[o]);
        continue;
      }
      const auto l1 = lambda.segment(o + 1, n - 1);
      const auto v1 = v.segment(o + 1, n - 1);
      const double a = v[o] * v[o] - v1.squaredNorm();
      const double b = lambda[o] * v[o] - l1.dot(v1);
      const double c = std::max(lambda[o] * lambda[o] - l1.squaredNorm(), 0.0);
      alpha = std::min(alpha, smallest_positive_root(a, b, c));
    }
    return alpha;
  }

private:
  // Smallest alpha > 0 with a alpha^2 + 2 b alpha + c = 0, or +inf.
  static double smallest_positive_root(double a, double b, double c)
  {
    if (c <= 0.0)
      return 0.0;
    const double scale = std::max({std::abs(a), std::abs(b), c});
    if (std::abs(a) <= 1e-300 * scale || std::abs(a) < 1e-15 * scale)
      return b < 0.0 ? -c / (2.0 * b) : kInf;
    const double disc = b * b - a * c;
    if (disc < 0.0)
      return kInf;
    const double sq = std::sqrt(disc);
    const double q = -(b + std::copysign(sq, b));
    double best = kInf;
    for (double r : {q / a, q != 0.0 ? c / q : kInf})
      if (r > 0.0)
        best = std::min(best, r);
    return best;
  }

  const ConeDims& _dims;
  std::vector<Index> _soc_offset;
  Index _m = 0;
};

//==============================================================================
// Nesterov-Todd scaling W with W z = W^{-1} s = lambda. W is symmetric.
class NtScaling
{
public:
  NtScaling(const ConeOps& ops, const VectorXd& s, const VectorXd& z)
  : _ops(ops)
  {
    const Index l = ops.linear();
    _d = (s.head(l).array() / z.head(l).array()).sqrt();
    for (int k = 0; k < ops.blocks(); ++k)
    {
      const Index o = ops.offset(k);
      const Index n = ops.block_size(k);
      const VectorXd sk = s.segment(o, n);
      const VectorXd zk = z.segment(o, n);
      const double sn = std::sqrt(jnorm2(sk));
      const double zn = std::sqrt(jnorm2(zk));
      const VectorXd sb = sk / sn;
      const VectorXd zb = zk / zn;
      const double gamma = std::sqrt(std::max((1.0 + sb.dot(zb)) / 2.0, 0.0));
      VectorXd w = sb;
      w[0] += zb[0];
      w.tail(n - 1) -= zb.tail(n - 1);
      w /= 2.0 * gamma;
      // Renormalize so that w0^2 - ||w1||^2 = 1 exactly.
      const double wn = jnorm2(w);
      if (wn > 0.0)
        w /= std::sqrt(wn);
      _w.push_back(w);
      _eta.push_back(std::sqrt(sn / zn));
    }
  }

  VectorXd apply(const VectorXd& x) const { return apply_impl(x, false); }
  VectorXd apply_inverse(const VectorXd& x) const { return apply_impl(x, true); }

  MatrixXd apply_inverse(const MatrixXd& X) const
  {
    MatrixXd out(X.rows(), X.cols());
    for (Index j = 0; j < X.cols(); ++j)
      out.col(j) = apply_impl(X.col(j), true);
    return out;
  }

private:
  static double jnorm2(const VectorXd& v)
  {
    return std::max(v[0] * v[0] - v.tail(v.size() - 1).squaredNorm(), 1e-300);
  }

  VectorXd apply_impl(const VectorXd& x, bool inverse) const
  {
    VectorXd r(x.size());
    const Index l = _ops.linear();
    if (inverse)
      r.head(l) = x.head(l).cwiseQuotient(_d);
    else
      r.head(l) = x.head(l).cwiseProduct(_d);
    const double sign = inverse ? -1.0 : 1.0;
    for (int k = 0; k < _ops.blocks(); ++k)
    {
      const Index o = _ops.offset(k);
      const Index n = _ops.block_size(k);
      const VectorXd& w = _w[static_cast<std::size_t>(k)];
      const double eta = _eta[static_cast<std::size_t>(k)];
      const double scale = inverse ? 1.0 / eta : eta;
      const double x0 = x[o];
      if (n == 1)
      {
        r[o] = scale * w[0] * x0;
        continue;
      }
      const auto x1 = x.segment(o + 1, n - 1);
      const auto w1 = w.tail(n - 1);
      const double w1x1 = w1.dot(x1);
      r[o] = scale * (w[0] * x0 + sign * w1x1);
      r.segment(o + 1, n - 1) =
        scale * (x1 + (sign * x0 + w1x1 / (1.0 + w[0])) * w1);
    }
    return r;
  }

  const ConeOps& _ops;
  VectorXd _d;
  std::vector<VectorXd> _w;
  std::vector<double> _eta;
};

//==============================================================================
// Reduced KKT system
//   [ G^T W^-2 G  A^T ] [ux]   [bx + G^T W^-2 bz]
//   [ A           0   ] [uy] = [by              ]
// returning W uz = W^-1 (G ux - bz).
class KktSolver
{
public:
  KktSolver(const MatrixXd& G, const MatrixXd& A, const NtScaling& W)
  : _A(A), _W(W)
  {
    _Gh = W.apply_inverse(G);
    const Index n = G.cols();
    const Index p = A.rows();
    _K = MatrixXd::Zero(n + p, n + p);
    _K.topLeftCorner(n, n) = _Gh.transpose() * _Gh;
    _K.topRightCorner(n, p) = A.transpose();
    _K.bottomLeftCorner(p, n) = A;
    // Symmetric diagonal scaling D K D, then a small quasi-definite shift.
    _D = VectorXd::Ones(n + p);
    for (Index i = 0; i < n; ++i)
    {
      const double d = _K(i, i);
      _D[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
    }
    for (Index i = 0; i < p; ++i)
    {
      const double r = (A.row(i).transpose().cwiseProduct(_D.head(n))).norm();
      _D[n + i] = r > 0.0 ? 1.0 / r : 1.0;
    }
    MatrixXd reg = _D.asDiagonal() * _K * _D.asDiagonal();
    reg.topLeftCorner(n, n).diagonal().array() += 1e-13;
    reg.bottomRightCorner(p, p).diagonal().array() -= 1e-13;
    _lu.compute(reg);
  }

  /// Solves with iterative refinement on the unreduced system
  ///   A^T uy + G^T uz = bx,  A ux = by,  G ux - W^2 uz = bz.
  void solve(const VectorXd& bx, const VectorXd& by, const VectorXd& bz,
    const MatrixXd& G, VectorXd& ux, VectorXd& uy, VectorXd& uz_scaled) const
  {
    solve_reduced(bx, by, bz, ux, uy, uz_scaled);
    const double ref = 1.0 + std::max({bx.lpNorm<Eigen::Infinity>(),
      by.size() > 0 ? by.lpNorm<Eigen::Infinity>() : 0.0,
      bz.lpNorm<Eigen::Infinity>()});
    for (int it = 0; it < 3; ++it)
    {
      const VectorXd uz = _W.apply_inverse(uz_scaled);
      const VectorXd r1 = bx - _A.transpose() * uy - G.transpose() * uz;
      const VectorXd r2 = by - _A * ux;
      const VectorXd r3 = bz - G * ux + _W.apply(uz_scaled);
      const double err = std::max({r1.lpNorm<Eigen::Infinity>(),
        r2.size() > 0 ? r2.lpNorm<Eigen::Infinity>() : 0.0,
        r3.lpNorm<Eigen::Infinity>()});
      if (err <= 1e-14 * ref)
        break;
      VectorXd cx, cy, cz;
      solve_reduced(r1, r2, r3, cx, cy, cz);
      ux += cx;
      uy += cy;
      uz_scaled += cz;
    }
  }

private:
  void solve_reduced(const VectorXd& bx, const VectorXd& by, const VectorXd& bz,
    VectorXd& ux, VectorXd& uy, VectorXd& uz_scaled) const
  {
    const Index n = _Gh.cols();
    const Index p = _A.rows();
    const VectorXd bzh = _W.apply_inverse(bz);
    VectorXd rhs(n + p);
    rhs.head(n) = bx + _Gh.transpose() * bzh;
    rhs.tail(p) = by;
    auto lu_solve = [&](const VectorXd& v) -> VectorXd
      {
        return _D.cwiseProduct(_lu.solve(VectorXd(_D.cwiseProduct(v))));
      };
    VectorXd sol = lu_solve(rhs);
    for (int it = 0; it < 3; ++it)
    {
      const VectorXd r = rhs - _K * sol;
      if (r.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))
        break;
      sol += lu_solve(r);
    }
    ux = sol.head(n);
    uy = sol.tail(p);
    uz_scaled = _Gh * ux - bzh;
  }

  const MatrixXd& _A;
  const NtScaling& _W;
  MatrixXd _Gh;
  MatrixXd _K;
  VectorXd _D;
  Eigen::PartialPivLU<MatrixXd> _lu;
};

// Row scaling that keeps every cone block invariant.
struct Equilibration
{
  VectorXd cone; // per G row
  VectorXd eq;   // per A row
};

Equilibration equilibrate(const ConicProblem& p, const ConeOps& ops)
{
  Equilibration e;
  e.cone = VectorXd::Ones(p.G.rows());
  e.eq = VectorXd::Ones(p.A.rows());
  auto inv = [](double norm) { return norm > 0.0 ? 1.0 / norm : 1.0; };
  for (Index i = 0; i < ops.linear(); ++i)
    e.cone[i] = inv(p.G.row(i).norm());
  for (int k = 0; k < ops.blocks(); ++k)
  {
    const Index o = ops.offset(k);
    const Index n = ops.block_size(k);
    double norm = 0.0;
    for (Index i = o; i < o + n; ++i)
      norm = std::max(norm, p.G.row(i).norm());
    e.cone.segment(o, n).setConstant(inv(norm));
  }
  for (Index i = 0; i < p.A.rows(); ++i)
    e.eq[i] = inv(p.A.row(i).norm());
  return e;
}

Residuals residuals_of(const ConicProblem& p, const VectorXd& x, const VectorXd& y,
  const VectorXd& z, const VectorXd& s)
{
  Residuals r;
  const double rp_eq = p.A.rows() > 0 ? (p.A * x - p.b).norm() / (1.0 + p.b.norm()) : 0.0;
  const double rp_cone = (p.G * x + s - p.h).norm() / (1.0 + p.h.norm());
  r.primal = std::max(rp_eq, rp_cone);
  VectorXd rd = p.c + p.G.transpose() * z;
  if (p.A.rows() > 0)
    rd += p.A.transpose() * y;
  r.dual = rd.norm() / (1.0 + p.c.norm());
  r.gap = std::abs(s.dot(z)) / (1.0 + std::abs(p.c.dot(x)));

  // Normalized Farkas residual of (y, z) as a primal infeasibility certificate.
  const double denom = -(p.h.dot(z) + (p.A.rows() > 0 ? p.b.dot(y) : 0.0));
  VectorXd gz = p.G.transpose() * z;
  if (p.A.rows() > 0)
    gz += p.A.transpose() * y;
  r.certificate = denom > 0.0 ? gz.norm() / denom : kInf;
  return r;
}

} // namespace

//==============================================================================
ConicSolution solve(const ConicProblem& problem, const SolverSettings& settings)
{
  problem.validate();
  const ConeOps ops(problem.dims);
  const Equilibration eq = equilibrate(problem, ops);

  const MatrixXd G = eq.cone.asDiagonal() * problem.G;
  const VectorXd h = eq.cone.cwiseProduct(problem.h);
  const MatrixXd A = eq.eq.asDiagonal() * problem.A;
  const VectorXd b = eq.eq.cwiseProduct(problem.b);
  const VectorXd& c = problem.c;
  const Index n = c.size();
  const Index m = G.rows();
  const Index p = A.rows();
  const VectorXd e = ops.identity();

  ConicSolution out;
  VectorXd x(n), y(p), z(m), s(m);

  // Least-norm starting points (W = I), shifted into the cone interior.
  {
    const VectorXd ones = VectorXd::Ones(m);
    const NtScaling I(ops, e, e);
    const KktSolver kkt(G, A, I);
    VectorXd ux, uy, uz;
    kkt.solve(VectorXd::Zero(n), b, h, G, ux, uy, uz);
    x = ux;
    s = -uz;
    kkt.solve(-c, VectorXd::Zero(p), VectorXd::Zero(m), G, ux, uy, uz);
    y = uy;
    z = uz;
    const double ts = ops.max_violation(s);
    if (ts >= -1e-8 * std::max(1.0, s.norm()))
      s += (1.0 + std::max(ts, 0.0)) * e;
    const double tz = ops.max_violation(z);
    if (tz >= -1e-8 * std::max(1.0, z.norm()))
      z += (1.0 + std::max(tz, 0.0)) * e;
  }

  auto original = [&](ConicSolution& sol)
    {
      sol.x = x;
      sol.y = eq.eq.cwiseProduct(y);
      sol.z = eq.cone.cwiseProduct(z);
      sol.s = s.cwiseQuotient(eq.cone);
      sol.objective = c.dot(x) + problem.c0;
      sol.residuals = residuals_of(problem, sol.x, sol.y, sol.z, sol.s);
    };

  const double tol = settings.tolerance;
  double best_metric = kInf;
  int last_improvement = 0;
  ConicSolution best;
  double best_seen = kInf;
  // Returns the best iterate seen, labelled with `status`.
  auto finish = [&](SolveStatus status)
    {
      if (best_seen < out.residuals.max())
      {
        const int iterations = out.iterations;
        out = best;
        out.iterations = iterations;
      }
      const Residuals& r = out.residuals;
      out.status = (r.primal <= tol && r.dual <= tol && r.gap <= tol)
        ? SolveStatus::Optimal : status;
      return out;
    };

  for (int iter = 0;; ++iter)
  {
    out.iterations = iter;
    original(out);
    const Residuals& r = out.residuals;
    if (r.primal <= tol && r.dual <= tol && r.gap <= tol)
    {
      out.status = SolveStatus::Optimal;
      return out;
    }
    if (r.certificate <= tol && r.primal > tol)
    {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    const double metric = r.max();
    if (metric < best_seen)
    {
      best_seen = metric;
      best = out;
    }
    if (metric < 0.9 * best_metric)
    {
      best_metric = metric;
      last_improvement = iter;
    }
    if (iter - last_improvement >= settings.stagnation_window)
      return finish(SolveStatus::Infeasible);
    if (iter >= settings.max_iterations)
      return finish(SolveStatus::MaxIterations);

    const VectorXd rx = c + G.transpose() * z + A.transpose() * y;
    const VectorXd ry = A * x - b;
    const VectorXd rz = G * x + s - h;
    const double mu = s.dot(z) / ops.degree();

    const NtScaling W(ops, s, z);
    const VectorXd lambda = W.apply(z);
    const KktSolver kkt(G, A, W);

    auto direction = [&](const VectorXd& rhs_s, VectorXd& dx, VectorXd& dy,
        VectorXd& ds, VectorXd& ds_t, VectorXd& dz_t)
      {
        const VectorXd delta = ops.divide(rhs_s, lambda);
        const VectorXd bz = -rz - W.apply(delta);
        kkt.solve(-rx, -ry, bz, G, dx, dy, dz_t);
        // Taken from the primal equation so that residuals shrink exactly.
        ds = -rz - G * dx;
        ds_t = W.apply_inverse(ds);
      };

    VectorXd dx, dy, ds, ds_t, dz_t;
    const VectorXd ll = ops.product(lambda, lambda);
    direction(-ll, dx, dy, ds, ds_t, dz_t);
    const double alpha_aff = std::min(
      {1.0, ops.max_step(lambda, ds_t), ops.max_step(lambda, dz_t)});
    double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), 0.0, 1.0);

    VectorXd rhs = -ll - ops.product(ds_t, dz_t) + sigma * mu * e;
    direction(rhs, dx, dy, ds, ds_t, dz_t);
    double alpha = std::min(ops.max_step(lambda, ds_t), ops.max_step(lambda, dz_t));
    if (!(alpha >= 1e-4) && sigma < settings.barrier_reduction)
    {
      // Plain path-following step when the corrector collapses.
      sigma = settings.barrier_reduction;
      direction(-ll + sigma * mu * e, dx, dy, ds, ds_t, dz_t);
      alpha = std::min(ops.max_step(lambda, ds_t), ops.max_step(lambda, dz_t));
    }
    alpha = std::min(1.0, 0.99 * alpha);
    if (!std::isfinite(alpha) || !dx.allFinite() || !dz_t.allFinite())
      return finish(SolveStatus::MaxIterations);

    x += alpha * dx;
    y += alpha * dy;
    s += alpha * ds;
    z += alpha * W.apply_inverse(dz_t);
  }
}

} // namespace irsplan
