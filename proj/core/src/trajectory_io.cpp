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


#include <irsplan/trajectory_io.hpp>

#include <irsplan/error.hpp>
#include <irsplan/textio.hpp>

#include <sstream>

namespace irsplan {

namespace {

const char* const kTrajectoryMagic = "irsplan-trajectory";
const char* const kTrajectoryHeader =
  "k,x,y,step_length,slot_energy,slot_rate_bits_s,ap_class,irs_class";

} // namespace

std::string trajectory_csv(
  const Trajectory& traj, const Scenario& s, const SnrModel& model)
{
  std::ostringstream out;
  out << kTrajectoryMagic << '\n'
      << "version," << kTrajectoryCsvVersion << '\n'
      << kTrajectoryHeader << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k)
  {
    const Position& q = traj[k];
    const double step = k == 0 ? 0.0 : (q - traj[k - 1]).norm();
    const double energy = k == 0 ? 0.0 : slot_energy(step, s);
    const LosClass cls = los_class(q, s);
    const Distances d = distances(q, s);
    out << k << ',' << format_double(q.x()) << ',' << format_double(q.y()) << ','
        << format_double(step) << ',' << format_double(energy) << ','
        << format_double(slot_rate(model.at(cls), d.ap, d.irs, s)) << ','
        << to_string(cls.ap) << ',' << to_string(cls.irs) << '\n';
  }
  return out.str();
}

Trajectory parse_trajectory_csv(const std::string& text, const std::string& source)
{
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what)
    {
      throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": " + what);
    };
  auto next = [&]() -> bool
    {
      if (!std::getline(in, line))
        return false;
      ++line_no;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      return true;
    };

  if (!next() || line != kTrajectoryMagic)
    fail("not an irsplan trajectory file");
  if (!next())
    fail("missing version line");
  {
    const auto f = split(line, ',');
    if (f.size() != 2 || f[0] != "version")
      fail("malformed version line");
    const long long v = parse_int(f[1], "version");
    if (v != kTrajectoryCsvVersion)
      throw Error(ErrorKind::UnsupportedVersion,
          source + ": trajectory version " + std::to_string(v) + " (supported: "
          + std::to_string(kTrajectoryCsvVersion) + ")");
  }
  if (!next() || line != kTrajectoryHeader)
    fail("unexpected column header");

  Trajectory traj;
  while (next())
  {
    if (line.empty())
      continue;
    const auto f = split(line, ',');
    if (f.size() != 8)
      fail("expected 8 fields, got " + std::to_string(f.size()));
    if (parse_int(f[0], "k") != static_cast<long long>(traj.size()))
      fail("slot index out of sequence");
    traj.emplace_back(parse_double(f[1], "x"), parse_double(f[2], "y"));
  }
  if (traj.empty())
    fail("no waypoints");
  return traj;
}

void save_trajectory(const Trajectory& traj, const Scenario& s,
  const SnrModel& model, const std::string& path)
{
  write_file(path, trajectory_csv(traj, s, model));
}

Trajectory load_trajectory(const std::string& path)
{
  return parse_trajectory_csv(read_file(path), path);
}

std::string trace_csv(const ScoTrace& trace)
{
  std::ostringstream out;
  out << "irsplan-sco-trace\n"
      << "version," << kTraceCsvVersion << '\n'
      << "iteration,energy,improvement,status,max_violation\n";
  for (const auto& it : trace.iterations)
  {
    out << it.iteration << ',' << format_double(it.energy) << ','
        << format_double(it.improvement) << ',' << it.status << ','
        << format_double(it.max_violation) << '\n';
  }
  return out.str();
}

} // namespace irsplan
