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

#ifndef IRSPLAN__CONFIG_HPP
#define IRSPLAN__CONFIG_HPP

#include <irsplan/scenario.hpp>

#include <cstdint>
#include <string>

namespace irsplan {

struct MapSettings
{
  int nx = 100;
  int ny = 60;
  int draws = 200;
  std::uint64_t seed = 1;
};

enum class FitMode
{
  PerClass,
  Global
};

struct FitSettings
{
  FitMode mode = FitMode::PerClass;
  int max_iterations = 500;
  double gradient_tol = 1e-10;
  int min_cells = 20;
};

struct PlannerSettings
{
  double grid_spacing = 1.0;
};

/// Stopping rule and trust region of the successive convex optimization.
struct ScoConfig
{
  double epsilon = 0.01;
  int n_it_max = 100;
  double trust_radius = 1.0;
  double min_trust_radius = 0.05;
  int max_retries = 5;

  void validate() const;
};

/// Interior-point settings for the conic subproblems.
struct SolverSettings
{
  double tolerance = 1e-8;
  int max_iterations = 200;
  double barrier_reduction = 0.1;
  int stagnation_window = 20;
};

struct Config
{
  Scenario scenario;
  MapSettings map;
  FitSettings fit;
  PlannerSettings planner;
  ScoConfig sco;
  SolverSettings solver;

  /// The document this configuration was parsed from, re-serialized in a
  /// canonical key order. Empty for programmatically built configs.
  std::string source_json;
};

/// Configuration with the reference scenario and default settings.
Config default_config();

/// Parses a JSON configuration document. Missing keys keep their defaults;
/// unknown keys and ill-typed values raise Error(Config) naming the key path.
Config parse_config(const std::string& text, const std::string& source_name);
Config load_config(const std::string& path);

std::string to_string(FitMode mode);

} // namespace irsplan

#endif // IRSPLAN__CONFIG_HPP
