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


#include "app.hpp"

#include <irsplan/audit.hpp>
#include <irsplan/error.hpp>
#include <irsplan/log.hpp>
#include <irsplan/p4.hpp>
#include <irsplan/planner.hpp>
#include <irsplan/radiomap.hpp>
#include <irsplan/sco.hpp>
#include <irsplan/textio.hpp>
#include <irsplan/trajectory_io.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace irsplan::app {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

int exit_code_for(ErrorKind kind)
{
  switch (kind)
  {
    case ErrorKind::Config:
    case ErrorKind::Parse:
    case ErrorKind::UnsupportedVersion:
    case ErrorKind::InvalidScenario:
    case ErrorKind::InvalidObstacle:
    case ErrorKind::Io:
      return kConfigError;
    case ErrorKind::InfeasibleEndpoint:
    case ErrorKind::GraphInfeasible:
      return kInfeasible;
    default:
      return kNumericalError;
  }
}

template<typename Fn>
int guarded(std::ostream& err, Fn&& fn)
{
  try
  {
    return fn();
  }
  catch (const Error& e)
  {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first
/// failure by index order.
template<typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn)
{
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]()
    {
      for (std::size_t i = next++; i < n; i = next++)
      {
        try
        {
          fn(i);
        }
        catch (...)
        {
          errors[i] = std::current_exception();
        }
      }
    };
  const auto count = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < std::min(count, n); ++t)
    threads.emplace_back(worker);
  worker();
  for (auto& t : threads)
    t.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

void ensure_directory(const std::string& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorKind::Io, "cannot create output directory " + dir);
}

std::string join(const std::string& dir, const std::string& name)
{
  return (fs::path(dir) / name).string();
}

ordered_json audit_json(const AuditReport& a)
{
  ordered_json j;
  j["passed"] = a.passed;
  j["max_violation"] = a.max_violation;
  j["average_rate_bps"] = a.average_rate;
  j["failures"] = a.failures;
  return j;
}

std::string gbps_label(double gbps)
{
  return format_double(gbps);
}

struct ModelSource
{
  std::optional<RadioMap> map;
  SnrModel model;
  std::string description;
};

/// Writes every artifact of one planning run into `dir`.
int write_plan(const Config& cfg, const ModelSource& src, const std::string& dir,
  bool dump_conic, std::ostream& out)
{
  ensure_directory(dir);
  const Scenario& s = cfg.scenario;
  if (src.map)
    save_map(*src.map, join(dir, "map.csv"));
  save_model(src.model, join(dir, "model.json"));

  ordered_json summary;
  summary["format"] = "irsplan-run-summary";
  summary["version"] = 1;

  PlanResult result;
  int code = kOk;
  std::string error;
  try
  {
    result = plan(s, src.model, cfg.planner, cfg.sco, cfg.solver);
  }
  catch (const ScoError& e)
  {
    result.trace = e.trace();
    result.status = PlanStatus::Stalled;
    error = e.what();
    code = exit_code_for(e.kind());
  }

  if (!result.init.me.empty())
    save_trajectory(result.init.me, s, src.model, join(dir, "init_me.csv"));
  if (!result.init.mr.empty())
    save_trajectory(result.init.mr, s, src.model, join(dir, "init_mr.csv"));

  if (dump_conic && result.init.feasible)
  {
    const Trajectory& q0 = result.init.trajectory;
    const auto lin = linearize_rate(src.model, slot_classes(q0, s), q0, s);
    const auto p4 = assemble_p4(s, lin, linearize_obstacles(q0, s.obstacles), q0,
      cfg.sco.trust_radius);
    write_file(join(dir, "p4_iteration1.cbf"), to_cbf(p4.conic));
  }

  if (!error.empty())
  {
    summary["status"] = "failed";
    summary["error"] = error;
  }
  else
  {
    summary["status"] = std::string(to_string(result.status));
  }
  if (result.init.feasible)
    summary["initial_solution"] = std::string(to_string(result.init.label));
  else
    summary["initial_solution"] = nullptr;
  if (!result.init.feasible && error.empty())
  {
    summary["reason"] = result.init.reason;
    code = kInfeasible;
  }

  if (!result.trace.iterations.empty())
  {
    write_file(join(dir, "trace.csv"), trace_csv(result.trace));
    summary["initial_energy_j"] = result.trace.iterations.front().energy;
    summary["iterations"] = static_cast<int>(result.trace.iterations.size()) - 1;
    summary["converged"] = result.trace.converged;
  }
  if (!result.trajectory.empty())
  {
    save_trajectory(result.trajectory, s, src.model, join(dir, "trajectory.csv"));
    summary["final_energy_j"] = result.energy;
    summary["average_rate_bps"] = rate(src.model, result.trajectory, s);
    summary["audit"] = audit_json(result.audit);
  }
  summary["r_min_bps"] = s.r_min;
  summary["irs_elements"] = s.m_elements;
  summary["scenario_hash"] = hex64(scenario_hash(s));
  summary["model_source"] = src.description;
  summary["map"] = {{"nx", cfg.map.nx}, {"ny", cfg.map.ny}, {"draws", cfg.map.draws},
    {"seed", cfg.map.seed}};
  summary["config"] = ordered_json::parse(cfg.source_json);
  write_file(join(dir, "summary.json"), summary.dump(2) + "\n");

  out << dir << ": " << summary["status"].get<std::string>();
  if (result.init.feasible)
    out << ", initial " << to_string(result.init.label);
  if (summary.contains("final_energy_j"))
    out << ", energy " << format_double(result.energy) << " J, "
        << summary["iterations"].get<int>() << " iterations";
  out << '\n';
  return code;
}

ModelSource model_source(const PlanOptions& opt, const Config& cfg)
{
  ModelSource src;
  const auto expected_hash = scenario_hash(cfg.scenario);
  if (!opt.model.empty())
  {
    src.model = load_model(opt.model);
    src.description = "model:" + fs::path(opt.model).filename().string();
    if (src.model.scenario_hash != 0 && src.model.scenario_hash != expected_hash)
      log(LogLevel::Warning, "model " + opt.model + " was fitted for a different scenario");
    return src;
  }
  if (!opt.map.empty())
  {
    src.map = load_map(opt.map);
    src.description = "map:" + fs::path(opt.map).filename().string();
  }
  else
  {
    src.map = build_map(cfg.scenario, cfg.map.nx, cfg.map.ny, cfg.map.draws,
      cfg.map.seed, opt.jobs);
    src.description = "generated";
  }
  if (src.map->scenario_hash() != expected_hash)
    log(LogLevel::Warning, "radio map was built for a different scenario");
  src.model = fit(*src.map, cfg.scenario, cfg.fit);
  return src;
}

void print_model(const SnrModel& model, std::ostream& out)
{
  for (int c = 0; c < kClassCount; ++c)
  {
    const ClassModel& m = model.at(c);
    out << LosClass::from_index(c).label() << ": A=" << format_double(m.A)
        << " B=" << format_double(m.B) << " C=" << format_double(m.C)
        << " nu=" << format_double(m.nu) << " mu=" << format_double(m.mu)
        << " points=" << m.points;
    if (m.inherited_from)
      out << " (inherited from " << LosClass::from_index(*m.inherited_from).label() << ")";
    out << '\n';
  }
}

} // namespace

//==============================================================================
Config effective_config(const std::string& path, const Overrides& o)
{
  nlohmann::json doc = nlohmann::json::object();
  if (!path.empty())
  {
    try
    {
      doc = nlohmann::json::parse(read_file(path));
    }
    catch (const nlohmann::json::exception& e)
    {
      throw Error(ErrorKind::Config, path + ": " + e.what());
    }
  }
  if (!doc.is_object())
    throw Error(ErrorKind::Config, "configuration root must be an object");
  if (o.irs_elements)
    doc["radio"]["irs_elements"] = *o.irs_elements;
  if (o.r_min_gbps)
    doc["qos"]["r_min_gbps"] = *o.r_min_gbps;
  if (o.nx)
    doc["map"]["nx"] = *o.nx;
  if (o.ny)
    doc["map"]["ny"] = *o.ny;
  if (o.draws)
    doc["map"]["draws"] = *o.draws;
  if (o.seed)
    doc["map"]["seed"] = *o.seed;
  if (o.fit_mode)
    doc["fit"]["mode"] = *o.fit_mode;
  return parse_config(doc.dump(), path.empty() ? "<defaults>" : path);
}

SnrModel model_from_config(const Config& cfg, int jobs)
{
  const RadioMap map = build_map(cfg.scenario, cfg.map.nx, cfg.map.ny, cfg.map.draws,
    cfg.map.seed, jobs);
  return fit(map, cfg.scenario, cfg.fit);
}

int cmd_map(const MapOptions& opt, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&]()
    {
      const Config cfg = effective_config(opt.config, opt.overrides);
      const RadioMap map = build_map(cfg.scenario, cfg.map.nx, cfg.map.ny,
        cfg.map.draws, cfg.map.seed, opt.jobs);
      save_map(map, opt.out);
      std::array<int, kClassCount> counts{};
      for (const auto& cell : map.cells())
        ++counts[static_cast<std::size_t>(cell.cls().index())];
      out << "wrote " << opt.out << " (" << map.nx() << "x" << map.ny() << ", "
          << cfg.map.draws << " draws/cell, seed " << cfg.map.seed << ")\n";
      for (int c = 0; c < kClassCount; ++c)
        out << "  " << LosClass::from_index(c).label() << ": "
            << counts[static_cast<std::size_t>(c)] << " cells\n";
      return int(kOk);
    });
}

int cmd_fit(const FitOptions& opt, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&]()
    {
      const Config cfg = effective_config(opt.config, opt.overrides);
      const RadioMap map = load_map(opt.map);
      if (map.scenario_hash() != scenario_hash(cfg.scenario))
        log(LogLevel::Warning, "radio map was built for a different scenario");
      const SnrModel model = fit(map, cfg.scenario, cfg.fit);
      save_model(model, opt.out);
      out << "wrote " << opt.out << " (" << to_string(model.mode()) << ")\n";
      print_model(model, out);
      return int(kOk);
    });
}

int cmd_plan(const PlanOptions& opt, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&]()
    {
      const Config cfg = effective_config(opt.config, opt.overrides);
      const ModelSource src = model_source(opt, cfg);
      return write_plan(cfg, src, opt.out, opt.dump_conic, out);
    });
}

int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&]()
    {
      if (opt.irs_elements.empty() || opt.r_min_gbps.empty())
        throw Error(ErrorKind::Config, "sweep axes --M and --rmin must be non-empty");
      ensure_directory(opt.out);

      // One map and model per IRS size, shared by every r_min.
      std::vector<ModelSource> sources(opt.irs_elements.size());
      std::vector<std::string> source_errors(opt.irs_elements.size());
      parallel_for(opt.irs_elements.size(), opt.jobs, [&](std::size_t i)
        {
          Overrides o = opt.overrides;
          o.irs_elements = opt.irs_elements[i];
          const Config cfg = effective_config(opt.config, o);
          try
          {
            PlanOptions po;
            sources[i] = model_source(po, cfg);
          }
          catch (const Error& e)
          {
            source_errors[i] = e.what();
          }
        });

      struct Cell
      {
        std::size_t m_index;
        double r_min;
        std::string dir;
        int code = kOk;
        std::string log;
        std::string error;
      };
      std::vector<Cell> cells;
      for (std::size_t i = 0; i < opt.irs_elements.size(); ++i)
        for (double r : opt.r_min_gbps)
          cells.push_back({i, r, join(opt.out, "M" + std::to_string(opt.irs_elements[i])
            + "_rmin" + gbps_label(r)), kOk, {}, {}});

      parallel_for(cells.size(), opt.jobs, [&](std::size_t c)
        {
          Cell& cell = cells[c];
          if (!source_errors[cell.m_index].empty())
          {
            cell.code = kNumericalError;
            cell.error = source_errors[cell.m_index];
            return;
          }
          Overrides o = opt.overrides;
          o.irs_elements = opt.irs_elements[cell.m_index];
          o.r_min_gbps = cell.r_min;
          std::ostringstream log_out;
          try
          {
            const Config cfg = effective_config(opt.config, o);
            cell.code = write_plan(cfg, sources[cell.m_index], cell.dir, false, log_out);
          }
          catch (const Error& e)
          {
            cell.code = exit_code_for(e.kind());
            cell.error = e.what();
          }
          cell.log = log_out.str();
        });

      std::ostringstream table;
      table << "irsplan-sweep\nversion,1\n"
            << "M,r_min_gbps,exit_code,status,initial_solution,final_energy_j,"
               "average_rate_bps,iterations\n";
      for (const Cell& cell : cells)
      {
        out << cell.log;
        std::string status = "failed";
        std::string init;
        std::string energy;
        std::string avg;
        std::string iterations;
        const std::string summary_path = join(cell.dir, "summary.json");
        if (cell.error.empty() && fs::exists(summary_path))
        {
          const auto j = nlohmann::json::parse(read_file(summary_path));
          status = j.at("status").get<std::string>();
          if (!j.at("initial_solution").is_null())
            init = j.at("initial_solution").get<std::string>();
          if (j.contains("final_energy_j"))
            energy = format_double(j.at("final_energy_j").get<double>());
          if (j.contains("average_rate_bps"))
            avg = format_double(j.at("average_rate_bps").get<double>());
          if (j.contains("iterations"))
            iterations = std::to_string(j.at("iterations").get<int>());
        }
        else
        {
          err << cell.dir << ": " << cell.error << '\n';
        }
        table << opt.irs_elements[cell.m_index] << ',' << gbps_label(cell.r_min) << ','
              << cell.code << ',' << status << ',' << init << ',' << energy << ','
              << avg << ',' << iterations << '\n';
      }
      write_file(join(opt.out, "results.csv"), table.str());
      out << "wrote " << join(opt.out, "results.csv") << '\n';
      return int(kOk);
    });
}

int cmd_audit(const AuditOptions& opt, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&]()
    {
      const Config cfg = effective_config(opt.config, opt.overrides);
      const SnrModel model = load_model(opt.model);
      const Trajectory traj = load_trajectory(opt.trajectory);
      const AuditReport a = audit_trajectory(traj, cfg.scenario, model);
      out << (a.passed ? "PASS" : "FAIL") << ": max step " << format_double(a.max_step)
          << " m, min obstacle margin " << format_double(a.min_margin)
          << ", average rate " << format_double(a.average_rate) << " bit/s, energy "
          << format_double(traj.size() == static_cast<std::size_t>(cfg.scenario.K) + 1
              ? motion_energy(traj, cfg.scenario) : 0.0)
          << " J\n";
      for (const auto& f : a.failures)
        out << "  " << f << '\n';
      return a.passed ? int(kOk) : int(kInfeasible);
    });
}

//==============================================================================
int run_cli(int argc, char** argv)
{
  CLI::App cli{"Energy-aware robot trajectory planning with IRS-assisted mm-wave links"};
  cli.require_subcommand(1);
  std::string config_path;

  auto add_overrides = [](CLI::App* sub, Overrides& o, bool map_flags)
    {
      sub->add_option("--M", o.irs_elements, "number of IRS elements");
      sub->add_option("--rmin", o.r_min_gbps, "minimum average rate [Gbit/s]");
      if (map_flags)
      {
        sub->add_option("--draws", o.draws, "channel draws per map cell");
        sub->add_option("--seed", o.seed, "radio-map seed");
      }
    };
  auto add_grid = [](CLI::App* sub, Overrides& o, std::vector<int>& grid)
    {
      sub->add_option("--grid", grid, "radio-map cells (nx ny)")->expected(2);
      (void)o;
    };
  auto apply_grid = [](Overrides& o, const std::vector<int>& grid)
    {
      if (grid.size() == 2)
      {
        o.nx = grid[0];
        o.ny = grid[1];
      }
    };

  MapOptions map_opt;
  std::vector<int> map_grid;
  auto* map_cmd = cli.add_subcommand("map", "build a radio map");
  map_cmd->add_option("--config", map_opt.config, "configuration file (JSON)");
  map_cmd->add_option("--out", map_opt.out, "radio-map CSV to write")->required();
  map_cmd->add_option("--jobs", map_opt.jobs, "worker threads");
  add_overrides(map_cmd, map_opt.overrides, true);
  add_grid(map_cmd, map_opt.overrides, map_grid);

  FitOptions fit_opt;
  auto* fit_cmd = cli.add_subcommand("fit", "fit the SNR model to a radio map");
  fit_cmd->add_option("--config", fit_opt.config, "configuration file (JSON)");
  fit_cmd->add_option("--map", fit_opt.map, "radio-map CSV")->required();
  fit_cmd->add_option("--out", fit_opt.out, "model JSON to write")->required();
  fit_cmd->add_option("--mode", fit_opt.overrides.fit_mode, "per_class or global");
  add_overrides(fit_cmd, fit_opt.overrides, false);

  PlanOptions plan_opt;
  std::vector<int> plan_grid;
  auto* plan_cmd = cli.add_subcommand("plan", "plan one trajectory");
  plan_cmd->add_option("--config", plan_opt.config, "configuration file (JSON)");
  plan_cmd->add_option("--map", plan_opt.map, "radio-map CSV to fit");
  plan_cmd->add_option("--model", plan_opt.model, "fitted model JSON");
  plan_cmd->add_option("--out", plan_opt.out, "output directory")->required();
  plan_cmd->add_option("--jobs", plan_opt.jobs, "worker threads for map building");
  plan_cmd->add_flag("--dump-conic", plan_opt.dump_conic,
    "write the first subproblem in CBF format");
  add_overrides(plan_cmd, plan_opt.overrides, true);
  add_grid(plan_cmd, plan_opt.overrides, plan_grid);

  SweepOptions sweep_opt;
  std::vector<int> sweep_grid;
  auto* sweep_cmd = cli.add_subcommand("sweep", "plan over a grid of (M, r_min)");
  sweep_cmd->add_option("--config", sweep_opt.config, "configuration file (JSON)");
  sweep_cmd->add_option("--M", sweep_opt.irs_elements, "IRS sizes, comma separated")
    ->delimiter(',')->required();
  sweep_cmd->add_option("--rmin", sweep_opt.r_min_gbps, "rates [Gbit/s], comma separated")
    ->delimiter(',')->required();
  sweep_cmd->add_option("--out", sweep_opt.out, "output directory")->required();
  sweep_cmd->add_option("--jobs", sweep_opt.jobs, "concurrent cells");
  sweep_cmd->add_option("--draws", sweep_opt.overrides.draws, "channel draws per map cell");
  sweep_cmd->add_option("--seed", sweep_opt.overrides.seed, "radio-map seed");
  add_grid(sweep_cmd, sweep_opt.overrides, sweep_grid);

  AuditOptions audit_opt;
  auto* audit_cmd = cli.add_subcommand("audit", "check a trajectory against all constraints");
  audit_cmd->add_option("--config", audit_opt.config, "configuration file (JSON)");
  audit_cmd->add_option("--model", audit_opt.model, "fitted model JSON")->required();
  audit_cmd->add_option("--trajectory", audit_opt.trajectory, "trajectory CSV")->required();
  add_overrides(audit_cmd, audit_opt.overrides, false);

  try
  {
    cli.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = cli.exit(e);
    return code == 0 ? 0 : int(kConfigError);
  }

  if (*map_cmd)
  {
    apply_grid(map_opt.overrides, map_grid);
    return cmd_map(map_opt, std::cout, std::cerr);
  }
  if (*fit_cmd)
    return cmd_fit(fit_opt, std::cout, std::cerr);
  if (*plan_cmd)
  {
    apply_grid(plan_opt.overrides, plan_grid);
    return cmd_plan(plan_opt, std::cout, std::cerr);
  }
  if (*sweep_cmd)
  {
    apply_grid(sweep_opt.overrides, sweep_grid);
    return cmd_sweep(sweep_opt, std::cout, std::cerr);
  }
  return cmd_audit(audit_opt, std::cout, std::cerr);
}

} // namespace irsplan::app
