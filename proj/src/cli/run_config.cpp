// Copyright 2026 The capnmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "capnmpc/cli.hpp"
#include "capnmpc/errors.hpp"

namespace capnmpc::cli {
namespace {

using nlohmann::json;

std::string join(const std::string & path, std::string_view key)
{
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void expect_object(const json & node, const std::string & path)
{
  if (!node.is_object()) {
    throw ConfigError(path, "expected an object");
  }
}

// Rejects keys outside `allowed`, so typos do not silently fall back to defaults.
void check_keys(const json & node, const std::string & path, std::initializer_list<std::string_view> allowed)
{
  for (const auto & item : node.items()) {
    bool known = false;
    for (std::string_view key : allowed) {
      known = known || item.key() == key;
    }
    if (!known) {
      throw ConfigError(join(path, item.key()), "unknown key");
    }
  }
}

double as_number(const json & value, const std::string & path)
{
  if (!value.is_number()) {
    throw ConfigError(path, "expected a number");
  }
  const double x = value.get<double>();
  if (!std::isfinite(x)) {
    throw ConfigError(path, "must be finite");
  }
  return x;
}

std::uint64_t as_count(const json & value, const std::string & path)
{
  if (value.is_number_unsigned()) {
    return value.get<std::uint64_t>();
  }
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(value.get<std::int64_t>());
  }
  throw ConfigError(path, "expected a non-negative integer");
}

void read_number(const json & node, std::string_view key, const std::string & path, double & out)
{
  if (node.contains(key)) {
    out = as_number(node.at(std::string(key)), join(path, key));
  }
}

std::vector<double> as_vector(const json & value, const std::string & path)
{
  if (!value.is_array()) {
    throw ConfigError(path, "expected an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(as_number(value[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::array<double, 2> as_interval(const json & value, const std::string & path)
{
  const std::vector<double> v = as_vector(value, path);
  if (v.size() != 2) {
    throw ConfigError(path, "expected [lower, upper]");
  }
  return {v[0], v[1]};
}

// Q as a diagonal list or a full row-major nested list.
Eigen::MatrixXd as_precision(const json & value, const std::string & path)
{
  if (!value.is_array() || value.empty()) {
    throw ConfigError(path, "expected a diagonal list or a square nested list");
  }
  if (!value.front().is_array()) {
    const std::vector<double> diag = as_vector(value, path);
    return Eigen::Map<const Eigen::VectorXd>(diag.data(), static_cast<Eigen::Index>(diag.size()))
      .asDiagonal();
  }
  const auto n = static_cast<Eigen::Index>(value.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    const std::vector<double> row = as_vector(value[static_cast<std::size_t>(r)], row_path);
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw ConfigError(row_path, "matrix must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)];
    }
  }
  return m;
}

std::string as_string(const json & value, const std::string & path)
{
  if (!value.is_string()) {
    throw ConfigError(path, "expected a string");
  }
  return value.get<std::string>();
}

Obstacle parse_obstacle(const json & node, const std::string & path)
{
  expect_object(node, path);
  check_keys(node, path, {"kind", "x", "y", "cruise_speed", "trigger_distance"});
  Obstacle o;
  if (node.contains("kind")) {
    const std::string kind = as_string(node.at("kind"), join(path, "kind"));
    if (kind == "fixed") {
      o.kind = ObstacleKind::fixed;
    } else if (kind == "moving") {
      o.kind = ObstacleKind::moving;
    } else {
      throw ConfigError(join(path, "kind"), "expected \"fixed\" or \"moving\"");
    }
  }
  if (!node.contains("x") || !node.contains("y")) {
    throw ConfigError(path, "obstacle needs x and y");
  }
  read_number(node, "x", path, o.initial.x);
  read_number(node, "y", path, o.initial.y);
  read_number(node, "cruise_speed", path, o.cruise_speed);
  read_number(node, "trigger_distance", path, o.trigger_distance);
  return o;
}

// Re-raises estimator validation errors under their dotted config path.
template <typename Fn>
void with_prefix(const std::string & prefix, Fn && fn)
{
  try {
    fn();
  } catch (const ConfigError & e) {
    const std::string what = e.what();
    const std::string reason = what.substr(std::min(what.size(), e.field().size() + 2));
    throw ConfigError(join(prefix, e.field()), reason);
  }
}

}  // namespace

nlohmann::json load_config_document(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("", "cannot open config file " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error & e) {
    // nlohmann reports "line L, column C" inside what()
    throw ConfigError("", path.string() + ": " + e.what());
  }
}

void apply_override(nlohmann::json & doc, const std::string & dotted_key, const std::string & value)
{
  if (dotted_key.empty()) {
    throw ConfigError("", "empty override key");
  }
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error &) {
    parsed = value;
  }
  if (!doc.is_object()) {
    doc = json::object();
  }
  json * node = &doc;
  std::size_t start = 0;
  std::string walked;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string key = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) {
      throw ConfigError(dotted_key, "malformed override key");
    }
    walked = join(walked, key);
    if (dot == std::string::npos) {
      (*node)[key] = parsed;
      return;
    }
    json & child = (*node)[key];
    if (walked == "scenario" && child.is_string()) {
      child = json{{"builtin", child.get<std::string>()}};
    }
    if (child.is_null()) {
      child = json::object();
    }
    if (!child.is_object()) {
      throw ConfigError(walked, "cannot override a field inside a non-object value");
    }
    node = &child;
    start = dot + 1;
  }
}

std::vector<std::pair<std::string, std::string>> parse_override_args(const std::vector<std::string> & args)
{
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string & arg = args[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) {
      throw ConfigError("", "unexpected argument '" + arg + "' (overrides are --key value)");
    }
    const std::string body = arg.substr(2);
    const std::size_t eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (i + 1 >= args.size()) {
      throw ConfigError(body, "override is missing a value");
    }
    out.emplace_back(body, args[++i]);
  }
  return out;
}

Scenario parse_scenario(const nlohmann::json & node)
{
  const std::string path = "scenario";
  if (node.is_string()) {
    return scenarios::builtin(node.get<std::string>());
  }
  expect_object(node, path);
  check_keys(
    node, path,
    {"builtin", "name", "road", "obstacles", "ego_init", "goal", "reference_speed", "control_bounds",
     "episode_length", "goal_tolerance", "dt", "safety_radius", "planning_margin", "vehicle_half_width",
     "wheelbase"});

  Scenario s;
  if (node.contains("builtin")) {
    s = scenarios::builtin(as_string(node.at("builtin"), "scenario.builtin"));
  } else {
    s.name = "custom";
  }
  if (node.contains("name")) {
    s.name = as_string(node.at("name"), "scenario.name");
  }
  if (node.contains("road")) {
    const json & road = node.at("road");
    const std::string rp = "scenario.road";
    expect_object(road, rp);
    check_keys(road, rp, {"kind", "amplitude", "wavelength", "width"});
    if (road.contains("kind")) {
      const std::string kind = as_string(road.at("kind"), rp + ".kind");
      if (kind == "straight") {
        s.road.kind = CenterlineKind::straight;
      } else if (kind == "sine") {
        s.road.kind = CenterlineKind::sine;
      } else {
        throw ConfigError(rp + ".kind", "expected \"straight\" or \"sine\"");
      }
    }
    read_number(road, "amplitude", rp, s.road.amplitude);
    read_number(road, "wavelength", rp, s.road.wavelength);
    read_number(road, "width", rp, s.road.width);
  }
  if (node.contains("obstacles")) {
    const json & list = node.at("obstacles");
    if (!list.is_array()) {
      throw ConfigError("scenario.obstacles", "expected an array");
    }
    s.obstacles.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      s.obstacles.push_back(parse_obstacle(list[i], "scenario.obstacles[" + std::to_string(i) + "]"));
    }
  }
  if (node.contains("ego_init")) {
    const json & ego = node.at("ego_init");
    const std::string ep = "scenario.ego_init";
    expect_object(ego, ep);
    check_keys(ego, ep, {"px", "py", "v", "psi"});
    read_number(ego, "px", ep, s.ego_init.px);
    read_number(ego, "py", ep, s.ego_init.py);
    read_number(ego, "v", ep, s.ego_init.v);
    read_number(ego, "psi", ep, s.ego_init.psi);
  }
  if (node.contains("goal")) {
    const json & goal = node.at("goal");
    const std::string gp = "scenario.goal";
    expect_object(goal, gp);
    check_keys(goal, gp, {"x", "y"});
    read_number(goal, "x", gp, s.goal.x);
    read_number(goal, "y", gp, s.goal.y);
  }
  if (node.contains("control_bounds")) {
    const json & b = node.at("control_bounds");
    const std::string bp = "scenario.control_bounds";
    expect_object(b, bp);
    check_keys(b, bp, {"a", "delta"});
    if (b.contains("a")) {
      const auto a = as_interval(b.at("a"), bp + ".a");
      s.bounds.lower.a = a[0];
      s.bounds.upper.a = a[1];
    }
    if (b.contains("delta")) {
      const auto d = as_interval(b.at("delta"), bp + ".delta");
      s.bounds.lower.delta = d[0];
      s.bounds.upper.delta = d[1];
    }
  }
  read_number(node, "reference_speed", path, s.reference_speed);
  if (node.contains("episode_length")) {
    s.episode_length = as_count(node.at("episode_length"), "scenario.episode_length");
  }
  read_number(node, "goal_tolerance", path, s.goal_tolerance);
  read_number(node, "dt", path, s.dt);
  read_number(node, "safety_radius", path, s.safety_radius);
  read_number(node, "planning_margin", path, s.planning_margin);
  read_number(node, "vehicle_half_width", path, s.vehicle_half_width);
  read_number(node, "wheelbase", path, s.wheelbase);
  s.validate();
  return s;
}

SolverConfig parse_solver(const nlohmann::json & node)
{
  const std::string path = "solver";
  SolverConfig cfg;
  if (node.is_null()) {
    return cfg;
  }
  expect_object(node, path);
  check_keys(
    node, path, {"H", "N", "Q", "R", "alpha", "beta", "eta_std", "smoother_bandwidth", "resample_threshold"});
  if (node.contains("H")) {
    cfg.horizon = as_count(node.at("H"), "solver.H");
  }
  if (node.contains("N")) {
    cfg.particles = as_count(node.at("N"), "solver.N");
  }
  if (node.contains("Q")) {
    cfg.control_precision = as_precision(node.at("Q"), "solver.Q");
  }
  if (node.contains("R")) {
    const std::vector<double> r = as_vector(node.at("R"), "solver.R");
    cfg.tracking_precision = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
  }
  read_number(node, "alpha", path, cfg.alpha);
  read_number(node, "beta", path, cfg.beta);
  read_number(node, "eta_std", path, cfg.eta_std);
  read_number(node, "smoother_bandwidth", path, cfg.smoother_bandwidth);
  read_number(node, "resample_threshold", path, cfg.resample_threshold);
  with_prefix(path, [&] { cfg.validate(); });
  return cfg;
}

RunConfig parse_run_config(const nlohmann::json & doc, const std::filesystem::path & base_dir)
{
  expect_object(doc, "");
  check_keys(doc, "", {"scenario", "solver", "model", "output_dir", "seed"});
  RunConfig cfg;
  if (!doc.contains("scenario")) {
    throw ConfigError("scenario", "missing");
  }
  cfg.scenario = parse_scenario(doc.at("scenario"));
  cfg.solver = parse_solver(doc.contains("solver") ? doc.at("solver") : json());
  cfg.solver.dt = cfg.scenario.dt;
  if (doc.contains("seed")) {
    cfg.seed = as_count(doc.at("seed"), "seed");
  }
  cfg.solver.seed = cfg.seed;

  if (doc.contains("model")) {
    const json & m = doc.at("model");
    if (m.is_string()) {
      const std::string kind = m.get<std::string>();
      if (kind != "bicycle") {
        throw ConfigError("model", "a bare model name must be \"bicycle\"; use {\"type\": \"mlp\", \"path\": ...}");
      }
    } else {
      expect_object(m, "model");
      check_keys(m, "model", {"type", "path"});
      const std::string type = m.contains("type") ? as_string(m.at("type"), "model.type") : "bicycle";
      if (type == "bicycle") {
        cfg.model.kind = ModelChoice::Kind::bicycle;
      } else if (type == "mlp") {
        cfg.model.kind = ModelChoice::Kind::mlp;
        if (!m.contains("path")) {
          throw ConfigError("model.path", "required for an mlp model");
        }
        std::filesystem::path p = as_string(m.at("path"), "model.path");
        if (p.is_relative()) {
          p = base_dir / p;
        }
        if (!std::filesystem::exists(p)) {
          throw ConfigError("model.path", "file not found: " + p.string());
        }
        cfg.model.path = p;
      } else {
        throw ConfigError("model.type", "expected \"bicycle\" or \"mlp\"");
      }
    }
  }

  std::filesystem::path out = doc.contains("output_dir") ? as_string(doc.at("output_dir"), "output_dir") : "out";
  if (out.is_relative()) {
    out = base_dir / out;
  }
  cfg.output_dir = out;
  return cfg;
}

nlohmann::json scenario_to_json(const Scenario & s)
{
  json obstacles = json::array();
  for (const Obstacle & o : s.obstacles) {
    json item{
      {"kind", o.kind == ObstacleKind::fixed ? "fixed" : "moving"}, {"x", o.initial.x}, {"y", o.initial.y}};
    if (o.kind == ObstacleKind::moving) {
      item["cruise_speed"] = o.cruise_speed;
      item["trigger_distance"] = o.trigger_distance;
    }
    obstacles.push_back(std::move(item));
  }
  return json{
    {"name", s.name},
    {"road",
     {{"kind", s.road.kind == CenterlineKind::straight ? "straight" : "sine"},
      {"amplitude", s.road.amplitude},
      {"wavelength", s.road.wavelength},
      {"width", s.road.width}}},
    {"obstacles", obstacles},
    {"ego_init", {{"px", s.ego_init.px}, {"py", s.ego_init.py}, {"v", s.ego_init.v}, {"psi", s.ego_init.psi}}},
    {"goal", {{"x", s.goal.x}, {"y", s.goal.y}}},
    {"reference_speed", s.reference_speed},
    {"control_bounds",
     {{"a", {s.bounds.lower.a, s.bounds.upper.a}}, {"delta", {s.bounds.lower.delta, s.bounds.upper.delta}}}},
    {"episode_length", s.episode_length},
    {"goal_tolerance", s.goal_tolerance},
    {"dt", s.dt},
    {"safety_radius", s.safety_radius},
    {"planning_margin", s.planning_margin},
    {"vehicle_half_width", s.vehicle_half_width},
    {"wheelbase", s.wheelbase},
  };
}

nlohmann::json solver_to_json(const SolverConfig & c)
{
  json q = json::array();
  const Eigen::MatrixXd & qm = c.control_precision;
  if (qm.isDiagonal(0.0)) {
    for (Eigen::Index i = 0; i < qm.rows(); ++i) {
      q.push_back(qm(i, i));
    }
  } else {
    for (Eigen::Index r = 0; r < qm.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index col = 0; col < qm.cols(); ++col) {
        row.push_back(qm(r, col));
      }
      q.push_back(std::move(row));
    }
  }
  json r = json::array();
  for (Eigen::Index i = 0; i < c.tracking_precision.size(); ++i) {
    r.push_back(c.tracking_precision(i));
  }
  return json{
    {"H", c.horizon},
    {"N", c.particles},
    {"Q", q},
    {"R", r},
    {"alpha", c.alpha},
    {"beta", c.beta},
    {"eta_std", c.eta_std},
    {"smoother_bandwidth", c.smoother_bandwidth},
    {"resample_threshold", c.resample_threshold},
  };
}

nlohmann::json run_config_to_json(const RunConfig & config)
{
  json model{{"type", config.model.kind == ModelChoice::Kind::bicycle ? "bicycle" : "mlp"}};
  if (config.model.kind == ModelChoice::Kind::mlp) {
    model["path"] = config.model.path.string();
  }
  return json{
    {"scenario", scenario_to_json(config.scenario)},
    {"solver", solver_to_json(config.solver)},
    {"model", model},
    {"output_dir", config.output_dir.string()},
    {"seed", config.seed},
  };
}

}  // namespace capnmpc::cli
