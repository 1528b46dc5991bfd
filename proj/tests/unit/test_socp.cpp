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

#include <irsplan/conic.hpp>
#include <irsplan/error.hpp>
#include <irsplan/socp.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace irsplan;

namespace {

struct Constructed
{
  ConicProblem problem;
  double optimum = 0.0;
};

/// Random problem with a known primal-dual optimal pair (x, y, s, z):
/// s and z lie in the cone with s^T z = 0, h = G x + s, b = A x and
/// c = -G^T z - A^T y, so c^T x is the optimal value.
Constructed constructed_socp(std::mt19937_64& rng)
{
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const int n = 3 + static_cast<int>(rng() % 8);
  const int p = static_cast<int>(rng() % 3);
  Constructed out;
  ConicProblem& P = out.problem;
  P.dims.linear = static_cast<int>(rng() % 5);
  const int blocks = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < blocks; ++i)
    P.dims.soc.push_back(1 + static_cast<int>(rng() % 4));
  const int m = P.dims.total();
  auto gauss = [&] { return nd(rng); };
  P.G = Eigen::MatrixXd::NullaryExpr(m, n, gauss);
  P.A = Eigen::MatrixXd::NullaryExpr(p, n, gauss);
  const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(n, gauss);
  const Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(p, gauss);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < P.dims.linear; ++i)
    (ud(rng) < 0.5 ? z[i] : s[i]) = ud(rng) + 0.1;
  int o = P.dims.linear;
  for (const int q : P.dims.soc)
  {
    const double r = ud(rng);
    if (q == 1)
      (r < 0.5 ? z[o] : s[o]) = 1.0;
    else
    {
      Eigen::VectorXd u = Eigen::VectorXd::NullaryExpr(q - 1, gauss);
      u.normalize();
      if (r < 0.33)
      {
        // both on the boundary, opposite rays
        s[o] = 1.0;
        s.segment(o + 1, q - 1) = u;
        z[o] = 2.0;
        z.segment(o + 1, q - 1) = -2.0 * u;
      }
      else if (r < 0.66)
      {
        z[o] = 2.0;
        z.segment(o + 1, q - 1) = u;
      }
      else
      {
        s[o] = 2.0;
        s.segment(o + 1, q - 1) = u;
      }
    }
    o += q;
  }
  P.h = P.G * x + s;
  P.b = P.A * x;
  P.c = -P.G.transpose() * z - P.A.transpose() * y;
  out.optimum = P.c.dot(x);
  return out;
}

} // namespace

TEST(Socp, SolvesConstructedProblems)
{
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t)
  {
    const Constructed c = constructed_socp(rng);
    const ConicSolution sol = solve(c.problem, SolverSettings{});
    ASSERT_EQ(sol.status, SolveStatus::Optimal) << "instance " << t;
    EXPECT_LT(std::abs(sol.objective - c.optimum) / (1.0 + std::abs(c.optimum)), 1e-6)
      << "instance " << t;
    EXPECT_LE(sol.residuals.max(), 1e-8);
    EXPECT_LT(sol.iterations, 60);
  }
}

TEST(Socp, UnitDiscLinearObjective)
{
  // min x1 + x2  s.t. ||(x1, x2)|| <= 1  ->  -sqrt(2)
  ConicProblem P;
  P.c = Eigen::Vector2d(1.0, 1.0);
  P.A.resize(0, 2);
  P.b.resize(0);
  P.dims.soc = {3};
  P.G = Eigen::MatrixXd::Zero(3, 2);
  P.G(1, 0) = -1.0;
  P.G(2, 1) = -1.0;
  P.h = Eigen::Vector3d(1.0, 0.0, 0.0);
  const ConicSolution sol = solve(P, SolverSettings{});
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.objective, -std::sqrt(2.0), 1e-7);
  EXPECT_NEAR(sol.x[0], -1.0 / std::sqrt(2.0), 1e-6);
}

TEST(Socp, DetectsInfeasibleLp)
{
  // x >= 1 and x <= 0
  ConicProblem P;
  P.dims.linear = 2;
  P.c = Eigen::VectorXd::Ones(1);
  P.G = Eigen::MatrixXd(2, 1);
  P.G << -1.0, 1.0;
  P.h = Eigen::Vector2d(-1.0, 0.0);
  P.A.resize(0, 1);
  P.b.resize(0);
  const ConicSolution sol = solve(P, SolverSettings{});
  EXPECT_EQ(sol.status, SolveStatus::Infeasible);
}

TEST(Socp, DetectsInfeasibleCone)
{
  // ||x|| <= 1 with x = 2 forced by an equality
  ConicProblem P;
  P.c = Eigen::VectorXd::Zero(1);
  P.A = Eigen::MatrixXd::Ones(1, 1);
  P.b = Eigen::VectorXd::Constant(1, 2.0);
  P.dims.soc = {2};
  P.G = Eigen::MatrixXd::Zero(2, 1);
  P.G(1, 0) = -1.0;
  P.h = Eigen::Vector2d(1.0, 0.0);
  EXPECT_EQ(solve(P, SolverSettings{}).status, SolveStatus::Infeasible);
}

TEST(Socp, DeterministicForIdenticalInput)
{
  std::mt19937_64 rng(99);
  const Constructed c = constructed_socp(rng);
  const ConicSolution a = solve(c.problem, SolverSettings{});
  const ConicSolution b = solve(c.problem, SolverSettings{});
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Socp, IterationCapReportsMaxIterations)
{
  std::mt19937_64 rng(5);
  const Constructed c = constructed_socp(rng);
  SolverSettings settings;
  settings.max_iterations = 2;
  EXPECT_EQ(solve(c.problem, settings).status, SolveStatus::MaxIterations);
}

TEST(Socp, ValidateRejectsInconsistentSizes)
{
  ConicProblem P;
  P.c = Eigen::VectorXd::Zero(2);
  P.A.resize(0, 2);
  P.b.resize(0);
  P.dims.linear = 2;
  P.G = Eigen::MatrixXd::Zero(3, 2);
  P.h = Eigen::VectorXd::Zero(2);
  try
  {
    P.validate();
    FAIL() << "expected Assembly";
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.kind(), ErrorKind::Assembly);
  }
  P.G = Eigen::MatrixXd::Zero(2, 2);
  P.h = Eigen::VectorXd::Zero(2);
  P.h[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(P.validate(), Error);
}

TEST(Conic, CbfRoundTrip)
{
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t)
  {
    Constructed c = constructed_socp(rng);
    c.problem.c0 = 0.5 * t;
    const std::string text = to_cbf(c.problem);
    const ConicProblem back = parse_cbf(text);
    EXPECT_EQ(back.dims, c.problem.dims);
    EXPECT_EQ(back.c, c.problem.c);
    EXPECT_EQ(back.c0, c.problem.c0);
    EXPECT_EQ(back.A, c.problem.A);
    EXPECT_EQ(back.b, c.problem.b);
    EXPECT_EQ(back.G, c.problem.G);
    EXPECT_EQ(back.h, c.problem.h);
    EXPECT_EQ(to_cbf(back), text);
  }
}

TEST(Conic, CbfHeaderAndCones)
{
  ConicProblem P;
  P.c = Eigen::Vector2d(1.0, 0.0);
  P.A = Eigen::MatrixXd::Ones(1, 2);
  P.b = Eigen::VectorXd::Ones(1);
  P.dims.linear = 1;
  P.dims.soc = {2};
  P.G = Eigen::MatrixXd::Identity(3, 2);
  P.h = Eigen::Vector3d(1.0, 2.0, 3.0);
  const std::string text = to_cbf(P);
  EXPECT_NE(text.find("VER\n3\n"), std::string::npos);
  EXPECT_NE(text.find("L+ 1\n"), std::string::npos);
  EXPECT_NE(text.find("Q 2\n"), std::string::npos);
  EXPECT_NE(text.find("L= 1\n"), std::string::npos);
}
