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


#ifndef IRSPLAN__CONIC_HPP
#define IRSPLAN__CONIC_HPP

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace irsplan {

/// Cone K = R_+^linear x Q^{soc[0]} x Q^{soc[1]} x ...
/// A second-order cone block (t, v) of size n requires ||v|| <= t.
struct ConeDims
{
  int linear = 0;
  std::vector<int> soc;

  int total() const;
  int degree() const { return linear + static_cast<int>(soc.size()); }

  friend bool operator==(const ConeDims&, const ConeDims&) = default;
};

/// minimize    c^T x + c0
/// subject to  A x = b
///             h - G x in K
struct ConicProblem
{
  Eigen::VectorXd c;
  double c0 = 0.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  ConeDims dims;

  int num_vars() const { return static_cast<int>(c.size()); }

  /// Throws Error(Assembly) on inconsistent sizes, empty cones or
  /// non-finite data.
  void validate() const;
};

/// Writes the problem in the Conic Benchmark Format (CBF, version 3).
/// Cone rows become `-G x + h` in L+ / Q domains, equalities `A x - b` in L=.
std::string to_cbf(const ConicProblem& problem);

/// Reads back what to_cbf() writes.
ConicProblem parse_cbf(const std::string& text);

} // namespace irsplan

#endif // IRSPLAN__CONIC_HPP
