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

#include <irsplan/radiomap.hpp>

#include <irsplan/channel.hpp>
#include <irsplan/error.hpp>
#include <irsplan/log.hpp>
#include <irsplan/textio.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace irsplan {

//==============================================================================
RadioMap::RadioMap(
  int nx,
  int ny,
  Workspace workspace,
  std::vector<MapCell> cells,
  std::uint64_t scenario_hash,
  std::uint64_t seed)
: _nx(nx),
  _ny(ny),
  _ws(workspace),
  _cells(std::move(cells)),
  _hash(scenario_hash),
  _seed(seed)
{
  if (nx < 1 || ny < 1)
    throw Error(ErrorKind::Domain, "radio map needs at least one cell");
  if (_cells.size() != static_cast<std::size_t>(nx) * ny)
    throw Error(ErrorKind::Domain, "radio map cell count mismatch");
  for (const auto& c : _cells)
  {
    if (!(c.avg_opt_snr >= 0.0) || c.n_draws < 1)
      throw Error(ErrorKind::Domain, "radio map cell violates invariants");
  }
}

//==============================================================================
Position RadioMap::center(int ix, int iy) const
{
  return {
    _ws.x_min + (ix + 0.5) * cell_size_x(),
    _ws.y_min + (iy + 0.5) * cell_size_y()};
}

//==============================================================================
double RadioMap::interpolate(const Position& q) const
{
  Position p = q;
  if (!_ws.contains(q))
  {
    p = _ws.clamp(q);
    log(LogLevel::Warning,
      "radio map queried outside the workspace at [" + format_double(q.x())
      + ", " + format_double(q.y()) + "]; clamping");
  }

  const double fx = std::clamp(
    (p.x() - _ws.x_min) / cell_size_x() - 0.5, 0.0, _nx - 1.0);
  const double fy = std::clamp(
    (p.y() - _ws.y_min) / cell_size_y() - 0.5, 0.0, _ny - 1.0);
  const int ix = std::min(static_cast<int>(fx), std::max(_nx - 2, 0));
  const int iy = std::min(static_cast<int>(fy), std::max(_ny - 2, 0));
  const int jx = std::min(ix + 1, _nx - 1);
  const int jy = std::min(iy + 1, _ny - 1);
  const double tx = fx - ix;
  const double ty = fy - iy;
  return (1 - tx) * (1 - ty) * at(ix, iy).avg_opt_snr
    + tx * (1 - ty) * at(jx, iy).avg_opt_snr
    + (1 - tx) * ty * at(ix, jy).avg_opt_snr
    + tx * ty * at(jx, jy).avg_opt_snr;
}

//==============================================================================
std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell_index)
{
  return mix_seed(seed, static_cast<std::uint64_t>(cell_index) + 0x9e37u);
}

//==============================================================================
std::vector<double> cell_samples(
  const Scenario& scenario,
  const Position& q,
  LosClass cls,
  int draws,
  std::uint64_t seed,
  std::size_t cell_index)
{
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(draws));
  if (draws < 1)
    return out;
  const std::uint64_t stream_seed = cell_seed(seed, cell_index);
  ChannelDraw d = draw_channel(q, scenario, cls, stream_seed);
  FadingStream stream(stream_seed);
  for (int j = 0; j < draws; ++j)
  {
    stream.next(d, scenario);
    out.push_back(optimal_snr(d, scenario));
  }
  return out;
}

//==============================================================================
RadioMap build_map(
  const Scenario& scenario,
  int nx,
  int ny,
  int draws_per_cell,
  std::uint64_t seed,
  int threads)
{
  if (nx < 1 || ny < 1 || draws_per_cell < 1)
    throw Error(ErrorKind::Domain, "need nx, ny, draws >= 1");

  const Workspace& ws = scenario.workspace;
  const std::size_t n_cells = static_cast<std::size_t>(nx) * ny;
  std::vector<MapCell> cells(n_cells);
  const double cx = ws.width() / nx;
  const double cy = ws.height() / ny;

  auto work = [&](std::size_t begin, std::size_t stride)
    {
      for (std::size_t idx = begin; idx < n_cells; idx += stride)
      {
        const int ix = static_cast<int>(idx % nx);
        const int iy = static_cast<int>(idx / nx);
        const Position q{ws.x_min + (ix + 0.5) * cx, ws.y_min + (iy + 0.5) * cy};
        const LosClass cls = los_class(q, scenario);
        const auto samples =
          cell_samples(scenario, q, cls, draws_per_cell, seed, idx);
        double sum = 0.0;
        for (double v : samples)
          sum += v;
        cells[idx] = {sum / draws_per_cell, draws_per_cell, cls.ap, cls.irs};
      }
    };

  const int n_threads = std::max(1, threads);
  if (n_threads == 1)
  {
    work(0, 1);
  }
  else
  {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back(work, static_cast<std::size_t>(t),
        static_cast<std::size_t>(n_threads));
    for (auto& th : pool)
      th.join();
  }

  return RadioMap(nx, ny, ws, std::move(cells), scenario_hash(scenario), seed);
}

//==============================================================================
namespace {

constexpr const char* kMagic = "irsplan-radio-map";
constexpr const char* kColumns =
  "ix,iy,x,y,ap_class,irs_class,avg_opt_snr_linear,n_draws";

} // namespace

std::string serialize_map(const RadioMap& map)
{
  std::ostringstream out;
  const auto& ws = map.workspace();
  out << kMagic << '\n'
      << "version," << kRadioMapVersion << '\n'
      << "grid," << map.nx() << ',' << map.ny() << '\n'
      << "cell_size," << format_double(map.cell_size_x()) << ','
      << format_double(map.cell_size_y()) << '\n'
      << "workspace," << format_double(ws.x_min) << ','
      << format_double(ws.x_max) << ',' << format_double(ws.y_min) << ','
      << format_double(ws.y_max) << '\n'
      << "scenario_hash," << hex64(map.scenario_hash()) << '\n'
      << "seed," << map.seed() << '\n'
      << kColumns << '\n';
  for (int iy = 0; iy < map.ny(); ++iy)
  {
    for (int ix = 0; ix < map.nx(); ++ix)
    {
      const MapCell& c = map.at(ix, iy);
      const Position p = map.center(ix, iy);
      out << ix << ',' << iy << ',' << format_double(p.x()) << ','
          << format_double(p.y()) << ',' << to_string(c.ap_class) << ','
          << to_string(c.irs_class) << ',' << format_double(c.avg_opt_snr)
          << ',' << c.n_draws << '\n';
    }
  }
  return out.str();
}

//==============================================================================
RadioMap parse_map(const std::string& text, const std::string& source)
{
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  auto where = [&](const std::string& field)
    {
      return source + ":" + std::to_string(line_no) + ": " + field;
    };

  auto next = [&](const char* expected_key) -> std::vector<std::string_view>
    {
      if (!std::getline(in, line))
        throw Error(ErrorKind::Parse,
            source + ": truncated file, missing '" + expected_key + "'");
      ++line_no;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      auto fields = split(line, ',');
      if (fields.front() != expected_key)
        throw Error(ErrorKind::Parse,
            where("expected '" + std::string(expected_key) + "'"));
      return fields;
    };

  auto expect_count = [&](const std::vector<std::string_view>& f, std::size_t n)
    {
      if (f.size() != n)
        throw Error(ErrorKind::Parse,
            where("expected " + std::to_string(n - 1) + " value(s) after '"
            + std::string(f.front()) + "'"));
    };

  next(kMagic);

  auto f = next("version");
  expect_count(f, 2);
  const auto version = parse_int(f[1], where("version"));
  if (version != kRadioMapVersion)
    throw Error(ErrorKind::UnsupportedVersion,
        where("radio map version " + std::to_string(version)
        + " is not supported (expected "
        + std::to_string(kRadioMapVersion) + ")"));

  f = next("grid");
  expect_count(f, 3);
  const int nx = static_cast<int>(parse_int(f[1], where("grid.nx")));
  const int ny = static_cast<int>(parse_int(f[2], where("grid.ny")));
  if (nx < 1 || ny < 1)
    throw Error(ErrorKind::Parse, where("grid dimensions must be >= 1"));

  f = next("cell_size");
  expect_count(f, 3);
  const double csx = parse_double(f[1], where("cell_size.x"));
  const double csy = parse_double(f[2], where("cell_size.y"));

  f = next("workspace");
  expect_count(f, 5);
  Workspace ws;
  ws.x_min = parse_double(f[1], where("workspace.x_min"));
  ws.x_max = parse_double(f[2], where("workspace.x_max"));
  ws.y_min = parse_double(f[3], where("workspace.y_min"));
  ws.y_max = parse_double(f[4], where("workspace.y_max"));
  if (csx != ws.width() / nx || csy != ws.height() / ny)
    throw Error(ErrorKind::Parse, where("cell_size inconsistent with grid"));

  f = next("scenario_hash");
  expect_count(f, 2);
  if (f[1].size() != 16)
    throw Error(ErrorKind::Parse, where("scenario_hash must be 16 hex digits"));
  std::uint64_t hash = 0;
  for (char ch : f[1])
  {
    int v = -1;
    if (ch >= '0' && ch <= '9')
      v = ch - '0';
    else if (ch >= 'a' && ch <= 'f')
      v = ch - 'a' + 10;
    if (v < 0)
      throw Error(ErrorKind::Parse, where("scenario_hash must be lowercase hex"));
    hash = (hash << 4) | static_cast<std::uint64_t>(v);
  }

  f = next("seed");
  expect_count(f, 2);
  const auto seed_text = std::string(f[1]);
  std::uint64_t seed = 0;
  try
  {
    std::size_t used = 0;
    seed = std::stoull(seed_text, &used);
    if (used != seed_text.size())
      throw std::invalid_argument("trailing");
  }
  catch (const std::exception&)
  {
    throw Error(ErrorKind::Parse, where("seed: expected an unsigned integer"));
  }

  next("ix");
  if (line != kColumns)
    throw Error(ErrorKind::Parse, where("unexpected column header"));

  std::vector<MapCell> cells(static_cast<std::size_t>(nx) * ny);
  std::vector<bool> seen(cells.size(), false);
  const std::size_t expected_rows = cells.size();
  for (std::size_t r = 0; r < expected_rows; ++r)
  {
    if (!std::getline(in, line))
      throw Error(ErrorKind::Parse,
          source + ": truncated file after " + std::to_string(r) + " of "
          + std::to_string(expected_rows) + " cell rows");
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    const auto c = split(line, ',');
    if (c.size() != 8)
      throw Error(ErrorKind::Parse, where("expected 8 fields per cell row"));
    const int ix = static_cast<int>(parse_int(c[0], where("ix")));
    const int iy = static_cast<int>(parse_int(c[1], where("iy")));
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny)
      throw Error(ErrorKind::Parse, where("cell index out of range"));
    const std::size_t idx = static_cast<std::size_t>(iy) * nx + ix;
    if (seen[idx])
      throw Error(ErrorKind::Parse, where("duplicate cell"));
    seen[idx] = true;

    const double x = parse_double(c[2], where("x"));
    const double y = parse_double(c[3], where("y"));
    if (x != ws.x_min + (ix + 0.5) * csx || y != ws.y_min + (iy + 0.5) * csy)
      throw Error(ErrorKind::Parse, where("cell center does not match grid"));

    MapCell& cell = cells[idx];
    try
    {
      cell.ap_class = link_class_from_string(std::string(c[4]));
      cell.irs_class = link_class_from_string(std::string(c[5]));
    }
    catch (const Error&)
    {
      throw Error(ErrorKind::Parse, where("class must be 'los' or 'nlos'"));
    }
    cell.avg_opt_snr = parse_double(c[6], where("avg_opt_snr_linear"));
    cell.n_draws = static_cast<int>(parse_int(c[7], where("n_draws")));
    if (!(cell.avg_opt_snr >= 0.0) || cell.n_draws < 1)
      throw Error(ErrorKind::Parse, where("cell violates snr >= 0, n_draws >= 1"));
  }

  while (std::getline(in, line))
  {
    ++line_no;
    if (!line.empty() && line != "\r")
      throw Error(ErrorKind::Parse, where("trailing content"));
  }

  return RadioMap(nx, ny, ws, std::move(cells), hash, seed);
}

//==============================================================================
void save_map(const RadioMap& map, const std::string& path)
{
  write_file(path, serialize_map(map));
}

RadioMap load_map(const std::string& path)
{
  return parse_map(read_file(path), path);
}

} // namespace irsplan
