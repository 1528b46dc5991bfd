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

#ifndef IRSPLAN__RADIOMAP_HPP
#define IRSPLAN__RADIOMAP_HPP

#include <irsplan/scenario.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace irsplan {

struct MapCell
{
  double avg_opt_snr = 0.0; ///< linear
  int n_draws = 0;
  LinkClass ap_class = LinkClass::Los;
  LinkClass irs_class = LinkClass::Los;

  LosClass cls() const { return {ap_class, irs_class}; }
  friend bool operator==(const MapCell&, const MapCell&) = default;
};

//==============================================================================
/// Averaged beamforming-optimal SNR on a regular grid of cell centers that
/// tiles the workspace. Immutable once built.
class RadioMap
{
public:
  RadioMap(
    int nx,
    int ny,
    Workspace workspace,
    std::vector<MapCell> cells,
    std::uint64_t scenario_hash,
    std::uint64_t seed);

  int nx() const { return _nx; }
  int ny() const { return _ny; }
  double cell_size_x() const { return _ws.width() / _nx; }
  double cell_size_y() const { return _ws.height() / _ny; }
  const Workspace& workspace() const { return _ws; }
  std::uint64_t scenario_hash() const { return _hash; }
  std::uint64_t seed() const { return _seed; }

  std::size_t index(int ix, int iy) const
  {
    return static_cast<std::size_t>(iy) * _nx + ix;
  }
  const MapCell& at(int ix, int iy) const { return _cells[index(ix, iy)]; }
  const std::vector<MapCell>& cells() const { return _cells; }
  Position center(int ix, int iy) const;

  /// Bilinear interpolation between cell centers. Positions outside the
  /// workspace are clamped with a logged warning.
  double interpolate(const Position& q) const;

  friend bool operator==(const RadioMap&, const RadioMap&) = default;

private:
  int _nx;
  int _ny;
  Workspace _ws;
  std::vector<MapCell> _cells;
  std::uint64_t _hash;
  std::uint64_t _seed;
};

/// Seed of the fading stream of cell `cell_index`; draw j of the cell is the
/// (j+1)-th realization of FadingStream(cell_seed(..)).
std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell_index);

/// Optimal SNR of every draw at one position (the samples a map cell averages).
std::vector<double> cell_samples(
  const Scenario& scenario,
  const Position& q,
  LosClass cls,
  int draws,
  std::uint64_t seed,
  std::size_t cell_index);

/// Builds the map; `threads` only changes the schedule, never the output.
RadioMap build_map(
  const Scenario& scenario,
  int nx,
  int ny,
  int draws_per_cell,
  std::uint64_t seed,
  int threads = 1);

inline constexpr int kRadioMapVersion = 1;

std::string serialize_map(const RadioMap& map);
RadioMap parse_map(const std::string& text, const std::string& source_name);
void save_map(const RadioMap& map, const std::string& path);
RadioMap load_map(const std::string& path);

} // namespace irsplan

#endif // IRSPLAN__RADIOMAP_HPP
