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

#include <irsplan/config.hpp>

#include <irsplan/error.hpp>
#include <irsplan/textio.hpp>

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <numbers>

namespace irsplan {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& msg)
{
  throw Error(ErrorKind::Config, (path.empty() ? "<root>" : path) + ": " + msg);
}

std::string join(const std::string& path, const std::string& key)
{
  return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path)
{
  if (!j.is_object())
    config_error(path, "expected an object");
}

void check_keys(
  const json& j,
  const std::string& path,
  std::initializer_list<const char*> allowed)
{
  require_object(j, path);
  for (const auto& item : j.items())
  {
    bool known = false;
    for (const char* a : allowed)
      known = known || item.key() == a;
    if (!known)
      config_error(join(path, item.key()), "unknown key");
  }
}

void read(const json& j, const char* key, const std::string& path, double& out)
{
  if (!j.contains(key))
    return;
  const auto& v = j.at(key);
  if (!v.is_number())
    config_error(join(path, key), "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out))
    config_error(join(path, key), "expected a finite number");
}

void read(const json& j, const char* key, const std::string& path, int& out)
{
  if (!j.contains(key))
    return;
  const auto& v = j.at(key);
  if (!v.is_number_integer())
    config_error(join(path, key), "expected an integer");
  out = v.get<int>();
}

void read(
  const json& j, const char* key, const std::string& path, std::uint64_t& out)
{
  if (!j.contains(key))
    return;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    config_error(join(path, key), "expected a non-negative integer");
  out = v.get<std::uint64_t>();
}

Position read_point(const json& v, const std::string& path)
{
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    config_error(path, "expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

void read(const json& j, const char* key, const std::string& path, Position& out)
{
  if (j.contains(key))
    out = read_point(j.at(key), join(path, key));
}

Obstacle read_obstacle(const json& j, const std::string& path)
{
  check_keys(j, path,
    {"center", "length", "width", "height", "angle_deg", "shape"});
  if (!j.contains("center") || !j.contains("height"))
    config_error(path, "obstacle needs 'center' and 'height'");
  const Position center = read_point(j.at("center"), join(path, "center"));
  double height = 0.0;
  read(j, "height", path, height);

  try
  {
    if (j.contains("shape"))
    {
      if (j.contains("length") || j.contains("width") || j.contains("angle_deg"))
        config_error(path, "give either 'shape' or 'length'/'width'/'angle_deg'");
      const auto& s = j.at("shape");
      if (!s.is_array() || s.size() != 2 || !s[0].is_array() || !s[1].is_array()
        || s[0].size() != 2 || s[1].size() != 2)
        config_error(join(path, "shape"), "expected [[a, b], [b, c]]");
      Eigen::Matrix2d m;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
        {
          if (!s[r][c].is_number())
            config_error(join(path, "shape"), "expected numbers");
          m(r, c) = s[r][c].get<double>();
        }
      return Obstacle(center, m, height);
    }

    double length = 0.0;
    double width = 0.0;
    double angle_deg = 0.0;
    read(j, "length", path, length);
    read(j, "width", path, width);
    read(j, "angle_deg", path, angle_deg);
    return Obstacle::ellipse(
      center, length, width, height, angle_deg * std::numbers::pi / 180.0);
  }
  catch (const Error& e)
  {
    if (e.kind() == ErrorKind::Config)
      throw;
    config_error(path, e.what());
  }
}

double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

} // namespace

//==============================================================================
void ScoConfig::validate() const
{
  if (!(epsilon > 0.0))
    throw Error(ErrorKind::Config, "sco.epsilon must be > 0");
  if (n_it_max < 1)
    throw Error(ErrorKind::Config, "sco.max_iterations must be >= 1");
  if (!(trust_radius > 0.0))
    throw Error(ErrorKind::Config, "sco.trust_radius_m must be > 0");
  if (!(min_trust_radius > 0.0) || max_retries < 0)
    throw Error(ErrorKind::Config, "invalid trust-region retry settings");
}

//==============================================================================
Config default_config()
{
  Config c;
  c.scenario = reference_scenario();
  return c;
}

//==============================================================================
Config parse_config(const std::string& text, const std::string& source_name)
{
  json root;
  try
  {
    root = json::parse(text);
  }
  catch (const json::parse_error& e)
  {
    throw Error(ErrorKind::Config, source_name + ": " + e.what());
  }

  Config cfg = default_config();
  Scenario& s = cfg.scenario;

  check_keys(root, "",
    {"workspace", "ap", "irs", "robot", "horizon", "safety_level", "radio",
     "qos", "obstacles", "map", "fit", "planner", "sco", "solver"});

  if (root.contains("workspace"))
  {
    const auto& w = root.at("workspace");
    check_keys(w, "workspace", {"x_min", "x_max", "y_min", "y_max"});
    read(w, "x_min", "workspace", s.workspace.x_min);
    read(w, "x_max", "workspace", s.workspace.x_max);
    read(w, "y_min", "workspace", s.workspace.y_min);
    read(w, "y_max", "workspace", s.workspace.y_max);
  }

  for (const char* key : {"ap", "irs"})
  {
    if (!root.contains(key))
      continue;
    const auto& a = root.at(key);
    check_keys(a, key, {"x", "y", "z"});
    const bool ap = std::string(key) == "ap";
    Position& p = ap ? s.ap_pos : s.irs_pos;
    read(a, "x", key, p.x());
    read(a, "y", key, p.y());
    read(a, "z", key, ap ? s.z_a : s.z_i);
  }

  if (root.contains("robot"))
  {
    const auto& r = root.at("robot");
    check_keys(r, "robot", {"z", "start", "goal", "v_max_mps", "energy"});
    read(r, "z", "robot", s.z_r);
    read(r, "start", "robot", s.q_s);
    read(r, "goal", "robot", s.q_d);
    read(r, "v_max_mps", "robot", s.v_max);
    if (r.contains("energy"))
    {
      const auto& e = r.at("energy");
      check_keys(e, "robot.energy", {"c1", "c2", "c3"});
      read(e, "c1", "robot.energy", s.c1);
      read(e, "c2", "robot.energy", s.c2);
      read(e, "c3", "robot.energy", s.c3);
    }
  }

  if (root.contains("horizon"))
  {
    const auto& h = root.at("horizon");
    check_keys(h, "horizon", {"slots", "slot_s"});
    read(h, "slots", "horizon", s.K);
    read(h, "slot_s", "horizon", s.delta_t);
  }

  read(root, "safety_level", "", s.d_s);

  if (root.contains("radio"))
  {
    const auto& r = root.at("radio");
    const std::string p = "radio";
    check_keys(r, p,
      {"tx_power_dbm", "noise_power_dbm", "bandwidth_hz", "path_loss_1m_db",
       "ap_antennas", "irs_elements", "los_exponent", "nlos_exponent"});
    double tx = watts_to_dbm(s.p_t);
    double noise = watts_to_dbm(s.noise_power);
    double loss = -10.0 * std::log10(s.rho);
    const bool has_tx = r.contains("tx_power_dbm");
    const bool has_noise = r.contains("noise_power_dbm");
    const bool has_loss = r.contains("path_loss_1m_db");
    read(r, "tx_power_dbm", p, tx);
    read(r, "noise_power_dbm", p, noise);
    read(r, "path_loss_1m_db", p, loss);
    if (has_tx)
      s.p_t = dbm_to_watts(tx);
    if (has_noise)
      s.noise_power = dbm_to_watts(noise);
    if (has_loss)
      s.rho = db_loss_to_gain(loss);
    read(r, "bandwidth_hz", p, s.bandwidth_hz);
    read(r, "ap_antennas", p, s.n_antennas);
    read(r, "irs_elements", p, s.m_elements);
    read(r, "los_exponent", p, s.los_exponent);
    read(r, "nlos_exponent", p, s.nlos_exponent);
  }

  if (root.contains("qos"))
  {
    const auto& q = root.at("qos");
    check_keys(q, "qos", {"r_min_gbps"});
    double gbps = s.r_min * 1e-9;
    read(q, "r_min_gbps", "qos", gbps);
    s.r_min = gbps * 1e9;
  }

  if (root.contains("obstacles"))
  {
    const auto& list = root.at("obstacles");
    if (!list.is_array())
      config_error("obstacles", "expected a list");
    s.obstacles.clear();
    for (std::size_t i = 0; i < list.size(); ++i)
      s.obstacles.push_back(
        read_obstacle(list[i], "obstacles[" + std::to_string(i) + "]"));
  }

  if (root.contains("map"))
  {
    const auto& m = root.at("map");
    check_keys(m, "map", {"nx", "ny", "draws", "seed"});
    read(m, "nx", "map", cfg.map.nx);
    read(m, "ny", "map", cfg.map.ny);
    read(m, "draws", "map", cfg.map.draws);
    read(m, "seed", "map", cfg.map.seed);
    if (cfg.map.nx < 2 || cfg.map.ny < 2 || cfg.map.draws < 1)
      config_error("map", "need nx, ny >= 2 and draws >= 1");
  }

  if (root.contains("fit"))
  {
    const auto& f = root.at("fit");
    check_keys(f, "fit", {"mode", "max_iterations", "gradient_tol", "min_cells"});
    if (f.contains("mode"))
    {
      const auto& m = f.at("mode");
      if (m == "per_class")
        cfg.fit.mode = FitMode::PerClass;
      else if (m == "global")
        cfg.fit.mode = FitMode::Global;
      else
        config_error("fit.mode", "expected \"per_class\" or \"global\"");
    }
    read(f, "max_iterations", "fit", cfg.fit.max_iterations);
    read(f, "gradient_tol", "fit", cfg.fit.gradient_tol);
    read(f, "min_cells", "fit", cfg.fit.min_cells);
  }

  if (root.contains("planner"))
  {
    const auto& p = root.at("planner");
    check_keys(p, "planner", {"grid_spacing_m"});
    read(p, "grid_spacing_m", "planner", cfg.planner.grid_spacing);
    if (!(cfg.planner.grid_spacing > 0.0))
      config_error("planner.grid_spacing_m", "must be > 0");
  }

  if (root.contains("sco"))
  {
    const auto& p = root.at("sco");
    check_keys(p, "sco",
      {"epsilon", "max_iterations", "trust_radius_m", "min_trust_radius_m",
       "max_retries"});
    read(p, "epsilon", "sco", cfg.sco.epsilon);
    read(p, "max_iterations", "sco", cfg.sco.n_it_max);
    read(p, "trust_radius_m", "sco", cfg.sco.trust_radius);
    read(p, "min_trust_radius_m", "sco", cfg.sco.min_trust_radius);
    read(p, "max_retries", "sco", cfg.sco.max_retries);
  }

  if (root.contains("solver"))
  {
    const auto& p = root.at("solver");
    check_keys(p, "solver",
      {"tolerance", "max_iterations", "barrier_reduction", "stagnation_window"});
    read(p, "tolerance", "solver", cfg.solver.tolerance);
    read(p, "max_iterations", "solver", cfg.solver.max_iterations);
    read(p, "barrier_reduction", "solver", cfg.solver.barrier_reduction);
    read(p, "stagnation_window", "solver", cfg.solver.stagnation_window);
  }

  try
  {
    s.validate();
    cfg.sco.validate();
  }
  catch (const Error& e)
  {
    throw Error(ErrorKind::Config, source_name + ": " + e.what());
  }

  cfg.source_json = root.dump(2);
  return cfg;
}

//==============================================================================
Config load_config(const std::string& path)
{
  std::string text;
  try
  {
    text = read_file(path);
  }
  catch (const Error& e)
  {
    throw Error(ErrorKind::Config, e.what());
  }
  return parse_config(text, path);
}

//==============================================================================
std::string to_string(FitMode mode)
{
  return mode == FitMode::PerClass ? "per_class" : "global";
}

} // namespace irsplan
