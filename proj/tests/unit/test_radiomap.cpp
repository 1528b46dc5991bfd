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

#include "testing.hpp"

#include <irsplan/error.hpp>
#include <irsplan/radiomap.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <numeric>

using namespace irsplan;

namespace {

double expected_snr(const Scenario& s, double da, double di, double nu, double mu)
{
  return oracle::snr_of(oracle::expected_gains(s, nu, mu), da, di, s);
}

} // namespace

TEST(RadioMap, CellAverageConvergesToExpectation)
{
  Scenario s;
  s.obstacles.clear();
  // near the IRS so every term matters
  const Position q(24.0, 1.5);
  const Distances d = distances(q, s);
  const std::vector<double> xs = cell_samples(s, q, {}, 4000, 17, 0);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double var = 0.0;
  for (double x : xs)
    var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / (xs.size() - 1) / xs.size());
  const double truth = expected_snr(s, d.ap, d.irs, 2.0, 2.0);
  EXPECT_LT(std::abs(mean - truth), 5.0 * se) << "mean " << mean << " truth " << truth;
}

TEST(RadioMap, ExpectationHoldsInNlos)
{
  Scenario s;
  s.obstacles.clear();
  s.m_elements = 16;
  const Position q(30.0, 3.0);
  const Distances d = distances(q, s);
  const std::vector<double> xs =
    cell_samples(s, q, {LinkClass::Nlos, LinkClass::Los}, 4000, 3, 5);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double var = 0.0;
  for (double x : xs)
    var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / (xs.size() - 1) / xs.size());
  EXPECT_LT(std::abs(mean - expected_snr(s, d.ap, d.irs, 2.0, 4.5)), 5.0 * se);
}

TEST(RadioMap, BuildIsIndependentOfThreadCount)
{
  const Scenario s = reference_scenario();
  const RadioMap a = build_map(s, 12, 8, 10, 5, 1);
  const RadioMap b = build_map(s, 12, 8, 10, 5, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(serialize_map(a), serialize_map(b));
}

TEST(RadioMap, CellsAverageTheirSamples)
{
  const Scenario s = reference_scenario();
  const RadioMap map = build_map(s, 10, 6, 7, 9, 1);
  for (int iy = 0; iy < map.ny(); iy += 2)
  {
    for (int ix = 0; ix < map.nx(); ix += 3)
    {
      const MapCell& cell = map.at(ix, iy);
      const Position q = map.center(ix, iy);
      EXPECT_EQ(cell.cls(), los_class(q, s));
      const auto xs = cell_samples(s, q, cell.cls(), 7, 9, map.index(ix, iy));
      const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
      EXPECT_LT(oracle::rel_diff(mean, cell.avg_opt_snr), 1e-12);
      EXPECT_EQ(cell.n_draws, 7);
    }
  }
}

TEST(RadioMap, SeedChangesSamples)
{
  const Scenario s = reference_scenario();
  EXPECT_NE(build_map(s, 4, 4, 3, 1), build_map(s, 4, 4, 3, 2));
}

TEST(RadioMap, InterpolationHitsCellCenters)
{
  const Scenario s = reference_scenario();
  const RadioMap map = build_map(s, 10, 6, 3, 1);
  EXPECT_DOUBLE_EQ(map.interpolate(map.center(3, 2)), map.at(3, 2).avg_opt_snr);
  const Position mid = 0.5 * (map.center(3, 2) + map.center(4, 2));
  EXPECT_NEAR(map.interpolate(mid),
    0.5 * (map.at(3, 2).avg_opt_snr + map.at(4, 2).avg_opt_snr),
    1e-9 * map.at(3, 2).avg_opt_snr);
}

TEST(RadioMap, SerializationRoundTripsExactly)
{
  const Scenario s = reference_scenario();
  const RadioMap map = build_map(s, 9, 5, 4, 77);
  const std::string text = serialize_map(map);
  const RadioMap back = parse_map(text, "mem");
  EXPECT_EQ(back, map);
  EXPECT_EQ(serialize_map(back), text);
}

TEST(RadioMap, ParseRejectsFutureVersion)
{
  const Scenario s = reference_scenario();
  std::string text = serialize_map(build_map(s, 2, 2, 1, 1));
  const auto pos = text.find("version,1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 9, "version,9");
  try
  {
    parse_map(text, "mem");
    FAIL() << "expected UnsupportedVersion";
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedVersion);
  }
}

TEST(RadioMap, RejectsInvalidCells)
{
  std::vector<MapCell> cells(4);
  for (auto& c : cells)
    c.n_draws = 1;
  cells[2].avg_opt_snr = -1.0;
  EXPECT_THROW(RadioMap(2, 2, Workspace{}, cells, 0, 0), Error);
  EXPECT_THROW(RadioMap(2, 3, Workspace{}, std::vector<MapCell>(4), 0, 0), Error);
}
