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


#ifndef IRSPLAN__TRAJECTORY_IO_HPP
#define IRSPLAN__TRAJECTORY_IO_HPP

#include <irsplan/scenario.hpp>
#include <irsplan/sco.hpp>
#include <irsplan/snrmodel.hpp>

#include <string>

namespace irsplan {

inline constexpr int kTrajectoryCsvVersion = 1;
inline constexpr int kTraceCsvVersion = 1;

/// Columns: k,x,y,step_length,slot_energy,slot_rate_bits_s,ap_class,irs_class.
/// Row k = 0 has zero step and energy.
std::string trajectory_csv(
  const Trajectory& traj, const Scenario& scenario, const SnrModel& model);

/// Reads the waypoints back; derived columns are ignored.
Trajectory parse_trajectory_csv(const std::string& text, const std::string& source_name);

void save_trajectory(const Trajectory& traj, const Scenario& scenario,
  const SnrModel& model, const std::string& path);
Trajectory load_trajectory(const std::string& path);

/// Columns: iteration,energy,improvement,status,max_violation.
std::string trace_csv(const ScoTrace& trace);

} // namespace irsplan

#endif // IRSPLAN__TRAJECTORY_IO_HPP
