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


#ifndef IRSPLAN_TOOLS__APP_HPP
#define IRSPLAN_TOOLS__APP_HPP

#include <irsplan/config.hpp>
#include <irsplan/snrmodel.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace irsplan::app {

/// Process exit codes.
enum ExitCode : int
{
  kOk = 0,
  kInfeasible = 2,
  kConfigError = 3,
  kNumericalError = 4
};

/// Overrides applied on top of the configuration document.
struct Overrides
{
  std::optional<int> irs_elements;
  std::optional<double> r_min_gbps;
  std::optional<int> nx;
  std::optional<int> ny;
  std::optional<int> draws;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> fit_mode;
};

/// Loads `path` (or the built-in defaults when empty), applies the overrides
/// and returns the effective configuration. Its source_json is the complete
/// document needed to reproduce a run.
Config effective_config(const std::string& path, const Overrides& overrides);

struct MapOptions
{
  std::string config;
  std::string out;
  Overrides overrides;
  int jobs = 1;
};

struct FitOptions
{
  std::string config;
  std::string map;
  std::string out;
  Overrides overrides;
};

struct PlanOptions
{
  std::string config;
  std::string map;   ///< optional radio map to fit
  std::string model; ///< optional fitted model; wins over `map`
  std::string out;   ///< output directory
  Overrides overrides;
  int jobs = 1;
  bool dump_conic = false;
};

struct SweepOptions
{
  std::string config;
  std::vector<int> irs_elements;
  std::vector<double> r_min_gbps;
  std::string out;
  Overrides overrides;
  int jobs = 1;
};

struct AuditOptions
{
  std::string config;
  std::string model;
  std::string trajectory;
  Overrides overrides;
};

int cmd_map(const MapOptions& opt, std::ostream& out, std::ostream& err);
int cmd_fit(const FitOptions& opt, std::ostream& out, std::ostream& err);
int cmd_plan(const PlanOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err);
int cmd_audit(const AuditOptions& opt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a verb.
int run_cli(int argc, char** argv);

/// Map building plus fitting with the configuration's settings.
SnrModel model_from_config(const Config& cfg, int jobs);

} // namespace irsplan::app

#endif // IRSPLAN_TOOLS__APP_HPP
