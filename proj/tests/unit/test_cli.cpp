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

#include <app.hpp>

#include <irsplan/textio.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace irsplan;
using namespace irsplan::app;
namespace fs = std::filesystem;

namespace {

Overrides small_map()
{
  Overrides o;
  o.nx = 20;
  o.ny = 12;
  o.draws = 4;
  o.seed = 3;
  return o;
}

int run(std::vector<std::string> args)
{
  args.insert(args.begin(), "irsplan");
  std::vector<char*> argv;
  for (auto& a : args)
    argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST(Cli, MapFitPlanAudit)
{
  const fs::path dir = oracle::scratch_dir("cli-chain");
  std::ostringstream out;
  std::ostringstream err;

  MapOptions m;
  m.out = (dir / "map.csv").string();
  m.overrides = small_map();
  ASSERT_EQ(cmd_map(m, out, err), kOk) << err.str();
  ASSERT_TRUE(fs::exists(m.out));

  FitOptions f;
  f.map = m.out;
  f.out = (dir / "model.json").string();
  f.overrides = small_map();
  ASSERT_EQ(cmd_fit(f, out, err), kOk) << err.str();

  PlanOptions p;
  p.model = f.out;
  p.out = (dir / "plan").string();
  p.overrides = small_map();
  p.overrides.r_min_gbps = 0.5;
  p.dump_conic = true;
  ASSERT_EQ(cmd_plan(p, out, err), kOk) << err.str();
  for (const char* name : {"summary.json", "trajectory.csv", "trace.csv", "init_me.csv",
         "init_mr.csv", "p4_iteration1.cbf"})
    EXPECT_TRUE(fs::exists(dir / "plan" / name)) << name;
  const std::string summary = read_file((dir / "plan" / "summary.json").string());
  EXPECT_NE(summary.find("\"status\": \"converged\""), std::string::npos) << summary;

  AuditOptions a;
  a.model = f.out;
  a.trajectory = (dir / "plan" / "trajectory.csv").string();
  a.overrides.r_min_gbps = 0.5;
  EXPECT_EQ(cmd_audit(a, out, err), kOk);
  a.overrides.r_min_gbps = 50.0;
  EXPECT_EQ(cmd_audit(a, out, err), kInfeasible);
}

TEST(Cli, UnreachableRateIsInfeasibleExit)
{
  const fs::path dir = oracle::scratch_dir("cli-infeasible");
  std::ostringstream out;
  std::ostringstream err;
  PlanOptions p;
  p.out = (dir / "plan").string();
  p.overrides = small_map();
  p.overrides.r_min_gbps = 50.0;
  EXPECT_EQ(cmd_plan(p, out, err), kInfeasible);
  const std::string summary = read_file((dir / "plan" / "summary.json").string());
  EXPECT_NE(summary.find("\"status\": \"infeasible\""), std::string::npos);
  EXPECT_NE(summary.find("\"initial_solution\": null"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitWithConfigCode)
{
  const fs::path dir = oracle::scratch_dir("cli-config");
  write_file((dir / "bad.json").string(), R"({"radio": {"irs_elemnts": 4}})");
  std::ostringstream out;
  std::ostringstream err;
  MapOptions m;
  m.config = (dir / "bad.json").string();
  m.out = (dir / "map.csv").string();
  EXPECT_EQ(cmd_map(m, out, err), kConfigError);
  EXPECT_NE(err.str().find("radio.irs_elemnts"), std::string::npos);
  m.config = (dir / "missing.json").string();
  EXPECT_EQ(cmd_map(m, out, err), kConfigError);
}

TEST(Cli, ArgumentErrorsExitWithConfigCode)
{
  EXPECT_EQ(run({"map"}), kConfigError);
  EXPECT_EQ(run({"bogus"}), kConfigError);
  EXPECT_EQ(run({"plan", "--out", "x", "--rmin", "fast"}), kConfigError);
}

TEST(Cli, SweepWritesOneRowPerCell)
{
  const fs::path dir = oracle::scratch_dir("cli-sweep");
  ASSERT_EQ(run({"sweep", "--M", "0,16", "--rmin", "0.5,50", "--grid", "20", "12",
              "--draws", "3", "--out", (dir / "sweep").string()}),
    kOk);
  const std::string text = read_file((dir / "sweep" / "results.csv").string());
  const auto rows = split(text, '\n');
  // magic, version, header, 4 cells, trailing empty
  ASSERT_EQ(rows.size(), 8u) << text;
  EXPECT_EQ(rows[0], "irsplan-sweep");
  EXPECT_NE(text.find("\n0,0.5,0,"), std::string::npos) << text;
  EXPECT_NE(text.find("\n16,50,2,infeasible"), std::string::npos) << text;
}
