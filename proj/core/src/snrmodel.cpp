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

#include <irsplan/snrmodel.hpp>

#include <irsplan/error.hpp>
#include <irsplan/textio.hpp>

#include <json.hpp>

#include <cmath>
#include <numbers>

namespace irsplan {

namespace {

void check_distances(double d_a, double d_i)
{
  if (!(d_a > 0.0) || !(d_i > 0.0))
    throw Error(ErrorKind::Domain,
        "distances must be > 0 (d_a=" + format_double(d_a) + ", d_i="
        + format_double(d_i) + ")");
}

/// The three power-law terms and their first and second distance partials.
struct Terms
{
  double S;      // gain polynomial
  double S_a;    // dS/dd_a
  double S_i;    // dS/dd_i
  double S_aa;
  double S_ii;
  double S_ai;
};

Terms terms(const ClassModel& m, double d_a, double d_i)
{
  const double pa = std::pow(d_i, -m.nu);
  const double pb = std::pow(d_i, -0.5 * m.nu) * std::pow(d_a, -0.5 * m.mu);
  const double pc = std::pow(d_a, -m.mu);
  const double hn = 0.5 * m.nu;
  const double hm = 0.5 * m.mu;

  Terms t;
  t.S = m.A * pa + m.B * pb + m.C * pc;
  t.S_i = (-m.nu * m.A * pa - hn * m.B * pb) / d_i;
  t.S_a = (-m.mu * m.C * pc - hm * m.B * pb) / d_a;
  t.S_ii = (m.nu * (m.nu + 1.0) * m.A * pa + hn * (hn + 1.0) * m.B * pb)
    / (d_i * d_i);
  t.S_aa = (m.mu * (m.mu + 1.0) * m.C * pc + hm * (hm + 1.0) * m.B * pb)
    / (d_a * d_a);
  t.S_ai = hn * hm * m.B * pb / (d_a * d_i);
  return t;
}

} // namespace

//==============================================================================
SnrModel::SnrModel(FitMode mode, std::array<ClassModel, kClassCount> classes)
: _mode(mode),
  _classes(std::move(classes))
{
  for (const auto& c : _classes)
  {
    if (!(c.A >= 0.0 && c.B >= 0.0 && c.C >= 0.0 && c.nu >= 0.0 && c.mu >= 0.0))
      throw Error(ErrorKind::Domain, "SNR model parameters must be >= 0");
  }
}

SnrModel SnrModel::uniform(const ClassModel& m)
{
  std::array<ClassModel, kClassCount> c;
  c.fill(m);
  return SnrModel(FitMode::Global, c);
}

//==============================================================================
double snr_gain(const ClassModel& m, double d_a, double d_i)
{
  check_distances(d_a, d_i);
  return m.A * std::pow(d_i, -m.nu)
    + m.B * std::pow(d_i, -0.5 * m.nu) * std::pow(d_a, -0.5 * m.mu)
    + m.C * std::pow(d_a, -m.mu);
}

double snr_hat(const ClassModel& m, double d_a, double d_i, const Scenario& s)
{
  return snr_gain(m, d_a, d_i) * s.snr_scale();
}

double snr_hat(
  const SnrModel& model, LosClass cls, double d_a, double d_i, const Scenario& s)
{
  return snr_hat(model.at(cls), d_a, d_i, s);
}

double slot_rate(const ClassModel& m, double d_a, double d_i, const Scenario& s)
{
  return s.bandwidth_hz * std::log2(1.0 + snr_hat(m, d_a, d_i, s));
}

//==============================================================================
RateGradient rate_gradient(
  const ClassModel& m, double d_a, double d_i, const Scenario& s)
{
  check_distances(d_a, d_i);
  const Terms t = terms(m, d_a, d_i);
  const double kappa = s.snr_scale();
  const double F = std::numbers::ln2 * (1.0 + kappa * t.S);
  return {
    s.bandwidth_hz * kappa * t.S_a / F,
    s.bandwidth_hz * kappa * t.S_i / F};
}

//==============================================================================
Eigen::Matrix2d rate_hessian_distances(
  const ClassModel& m, double d_a, double d_i, const Scenario& s)
{
  check_distances(d_a, d_i);
  const Terms t = terms(m, d_a, d_i);
  const double kappa = s.snr_scale();
  const double F = std::numbers::ln2 * (1.0 + kappa * t.S);
  const double scale = s.bandwidth_hz;
  const double ln2 = std::numbers::ln2;

  // d/dx (kappa S_x / F) = kappa S_xx / F - ln2 kappa^2 S_x S_y / F^2.
  Eigen::Matrix2d H;
  H(0, 0) = kappa * t.S_aa / F - ln2 * kappa * kappa * t.S_a * t.S_a / (F * F);
  H(1, 1) = kappa * t.S_ii / F - ln2 * kappa * kappa * t.S_i * t.S_i / (F * F);
  H(0, 1) = kappa * t.S_ai / F - ln2 * kappa * kappa * t.S_a * t.S_i / (F * F);
  H(1, 0) = H(0, 1);
  return scale * H;
}

//==============================================================================
std::vector<LosClass> slot_classes(
  std::span<const Position> traj, const Scenario& s)
{
  std::vector<LosClass> out;
  out.reserve(traj.size());
  for (const auto& q : traj)
    out.push_back(los_class(q, s));
  return out;
}

double rate(
  const SnrModel& model,
  std::span<const LosClass> class_per_slot,
  std::span<const Position> traj,
  const Scenario& s)
{
  if (traj.size() != static_cast<std::size_t>(s.K) + 1
    || class_per_slot.size() != traj.size())
    throw Error(ErrorKind::InvalidTrajectory,
        "rate needs K+1 waypoints and one class per waypoint");
  double sum = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k)
  {
    const Distances d = distances(traj[k], s);
    sum += slot_rate(model.at(class_per_slot[k]), d.ap, d.irs, s);
  }
  return sum / s.K;
}

double rate(
  const SnrModel& model,
  std::span<const Position> traj,
  const Scenario& s)
{
  const auto cls = slot_classes(traj, s);
  return rate(model, cls, traj, s);
}

//==============================================================================
RateLinearization::RateLinearization(std::vector<Slot> slots, int K)
: _slots(std::move(slots)),
  _K(K)
{
  if (_slots.size() != static_cast<std::size_t>(K) + 1)
    throw Error(ErrorKind::InvalidTrajectory, "linearization needs K+1 slots");
}

double RateLinearization::slot_value(
  std::size_t k, const Position& q, const Scenario& s) const
{
  const Slot& sl = _slots.at(k);
  const Distances d = distances(q, s);
  return sl.value + sl.grad.d_a * (d.ap - sl.d_a0)
    + sl.grad.d_i * (d.irs - sl.d_i0);
}

double RateLinearization::average(
  std::span<const Position> traj, const Scenario& s) const
{
  if (traj.size() != _slots.size())
    throw Error(ErrorKind::InvalidTrajectory, "trajectory length mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k)
    sum += slot_value(k, traj[k], s);
  return sum / _K;
}

Eigen::Vector2d RateLinearization::position_gradient(
  std::size_t k, const Position& q, const Scenario& s) const
{
  const Slot& sl = _slots.at(k);
  const Distances d = distances(q, s);
  return sl.grad.d_a * (q - s.ap_pos) / d.ap
    + sl.grad.d_i * (q - s.irs_pos) / d.irs;
}

Eigen::Matrix2d RateLinearization::position_hessian(
  std::size_t k, const Position& q, const Scenario& s) const
{
  const Slot& sl = _slots.at(k);
  const Distances d = distances(q, s);

  // Hessian of sqrt(dz^2 + |q - p|^2) is (D^2 I - u u^T) / D^3.
  auto norm_hessian = [](const Eigen::Vector2d& u, double D)
    {
      return Eigen::Matrix2d(
        (D * D * Eigen::Matrix2d::Identity() - u * u.transpose())
        / (D * D * D));
    };

  return sl.grad.d_a * norm_hessian(q - s.ap_pos, d.ap)
    + sl.grad.d_i * norm_hessian(q - s.irs_pos, d.irs);
}

RateLinearization linearize_rate(
  const SnrModel& model,
  std::span<const LosClass> class_per_slot,
  std::span<const Position> expansion_traj,
  const Scenario& s)
{
  if (expansion_traj.size() != static_cast<std::size_t>(s.K) + 1
    || class_per_slot.size() != expansion_traj.size())
    throw Error(ErrorKind::InvalidTrajectory,
        "linearization needs K+1 waypoints and one class per waypoint");

  std::vector<RateLinearization::Slot> slots;
  slots.reserve(expansion_traj.size());
  for (std::size_t k = 0; k < expansion_traj.size(); ++k)
  {
    const ClassModel& m = model.at(class_per_slot[k]);
    const Distances d = distances(expansion_traj[k], s);
    RateLinearization::Slot sl;
    sl.d_a0 = d.ap;
    sl.d_i0 = d.irs;
    sl.value = slot_rate(m, d.ap, d.irs, s);
    sl.grad = rate_gradient(m, d.ap, d.irs, s);
    sl.cls = class_per_slot[k];
    slots.push_back(sl);
  }
  return RateLinearization(std::move(slots), s.K);
}

//==============================================================================
FitError::FitError(const std::string& what, ClassModel best)
: Error(ErrorKind::FitFailure, what),
  _best(std::move(best))
{
}

//==============================================================================
using nlohmann::json;

std::string serialize_model(const SnrModel& model)
{
  json j;
  j["format"] = "irsplan-snr-model";
  j["version"] = kSnrModelVersion;
  j["mode"] = to_string(model.mode());
  j["scenario_hash"] = hex64(model.scenario_hash);
  json classes = json::array();
  for (int c = 0; c < kClassCount; ++c)
  {
    const ClassModel& m = model.at(c);
    json e;
    e["class"] = LosClass::from_index(c).label();
    e["A"] = m.A;
    e["B"] = m.B;
    e["C"] = m.C;
    e["nu"] = m.nu;
    e["mu"] = m.mu;
    e["residual_norm"] = m.residual_norm;
    e["points"] = m.points;
    e["iterations"] = m.iterations;
    e["inherited_from"] = m.inherited_from
      ? json(LosClass::from_index(*m.inherited_from).label()) : json(nullptr);
    classes.push_back(e);
  }
  j["classes"] = classes;
  return j.dump(2) + "\n";
}

SnrModel parse_model(const std::string& text, const std::string& source)
{
  json j;
  try
  {
    j = json::parse(text);
  }
  catch (const json::parse_error& e)
  {
    throw Error(ErrorKind::Parse, source + ": " + e.what());
  }

  auto fail = [&](const std::string& field, const std::string& msg)
    {
      throw Error(ErrorKind::Parse, source + ": " + field + ": " + msg);
    };

  if (!j.is_object() || j.value("format", "") != "irsplan-snr-model")
    fail("format", "not an irsplan SNR model file");
  if (!j.contains("version") || !j["version"].is_number_integer())
    fail("version", "missing");
  if (j["version"].get<int>() != kSnrModelVersion)
    throw Error(ErrorKind::UnsupportedVersion,
        source + ": SNR model version " + j["version"].dump()
        + " is not supported");

  FitMode mode = FitMode::PerClass;
  const std::string mode_text = j.value("mode", "");
  if (mode_text == "global")
    mode = FitMode::Global;
  else if (mode_text != "per_class")
    fail("mode", "expected per_class or global");

  std::uint64_t hash = 0;
  if (j.contains("scenario_hash") && j["scenario_hash"].is_string())
    hash = std::stoull(j["scenario_hash"].get<std::string>(), nullptr, 16);

  const auto& classes = j.value("classes", json());
  if (!classes.is_array() || classes.size() != kClassCount)
    fail("classes", "expected 4 class blocks");

  std::array<ClassModel, kClassCount> out;
  for (int c = 0; c < kClassCount; ++c)
  {
    const auto& e = classes[c];
    const std::string field = "classes[" + std::to_string(c) + "]";
    if (!e.is_object() || e.value("class", "") != LosClass::from_index(c).label())
      fail(field, "class blocks must be in index order");
    auto num = [&](const char* key)
      {
        if (!e.contains(key) || !e[key].is_number())
          fail(field + "." + key, "expected a number");
        return e[key].get<double>();
      };
    ClassModel& m = out[c];
    m.A = num("A");
    m.B = num("B");
    m.C = num("C");
    m.nu = num("nu");
    m.mu = num("mu");
    m.residual_norm = num("residual_norm");
    m.points = static_cast<int>(num("points"));
    m.iterations = static_cast<int>(num("iterations"));
    if (e.contains("inherited_from") && e["inherited_from"].is_string())
    {
      const auto label = e["inherited_from"].get<std::string>();
      for (int o = 0; o < kClassCount; ++o)
        if (LosClass::from_index(o).label() == label)
          m.inherited_from = o;
      if (!m.inherited_from)
        fail(field + ".inherited_from", "unknown class");
    }
  }

  try
  {
    SnrModel model(mode, out);
    model.scenario_hash = hash;
    return model;
  }
  catch (const Error& e)
  {
    throw Error(ErrorKind::Parse, source + ": " + e.what());
  }
}

void save_model(const SnrModel& model, const std::string& path)
{
  write_file(path, serialize_model(model));
}

SnrModel load_model(const std::string& path)
{
  return parse_model(read_file(path), path);
}

} // namespace irsplan
