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


#ifndef IRSPLAN__SOCP_HPP
#define IRSPLAN__SOCP_HPP

#include <irsplan/config.hpp>
#include <irsplan/conic.hpp>

#include <Eigen/Dense>

#include <string_view>

namespace irsplan {

enum class SolveStatus
{
  Optimal,
  MaxIterations,
  Infeasible
};

std::string_view to_string(SolveStatus status);

struct Residuals
{
  double primal = 0.0; ///< max(||A x - b||, ||G x + s - h||), scaled
  double dual = 0.0;   ///< ||c + A^T y + G^T z||, scaled
  double gap = 0.0;    ///< s^T z / max(1, |c^T x|)
  double certificate = 0.0; ///< Farkas residual, meaningful when infeasible

  double max() const;
};

struct ConicSolution
{
  SolveStatus status = SolveStatus::MaxIterations;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  Eigen::VectorXd s;
  double objective = 0.0; ///< c^T x + c0
  Residuals residuals;
  int iterations = 0;
};

/// Primal-dual interior-point method with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector. Deterministic for identical inputs.
ConicSolution solve(const ConicProblem& problem, const SolverSettings& settings);

} // namespace irsplan

#endif // IRSPLAN__SOCP_HPP
