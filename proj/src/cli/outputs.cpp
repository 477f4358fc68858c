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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "capnmpc/cli.hpp"

namespace capnmpc::cli {
namespace {

std::string fmt(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_output(const std::filesystem::path & path)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

nlohmann::json finite_or_null(double x)
{
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

// One row per recorded state; the last state has no applied control and
// carries zeros in the control columns.
void write_trajectory_csv(const std::filesystem::path & path, const EpisodeResult & result, double dt)
{
  std::ofstream out = open_output(path);
  out << "t,px,py,v,psi,a,delta\n";
  for (std::size_t k = 0; k < result.states.size(); ++k) {
    const VehicleState & s = result.states[k];
    const ControlInput u = k < result.controls.size() ? result.controls[k] : ControlInput{};
    out << fmt(static_cast<double>(k) * dt) << ',' << fmt(s.px) << ',' << fmt(s.py) << ',' << fmt(s.v)
        << ',' << fmt(s.psi) << ',' << fmt(u.a) << ',' << fmt(u.delta) << '\n';
  }
}

void write_distances_csv(const std::filesystem::path & path, const EpisodeResult & result, double dt)
{
  std::ofstream out = open_output(path);
  out << "t,min_obstacle_distance,boundary_margin\n";
  for (std::size_t k = 0; k < result.states.size(); ++k) {
    out << fmt(static_cast<double>(k) * dt) << ',' << fmt(result.min_obstacle_distance[k]) << ','
        << fmt(result.boundary_margin[k]) << '\n';
  }
}

nlohmann::json episode_metrics(const EpisodeResult & result)
{
  double min_margin = INFINITY;
  for (double m : result.boundary_margin) {
    min_margin = std::min(min_margin, m);
  }
  nlohmann::json doc{
    {"success", result.success},
    {"collision", result.collision},
    {"steps_to_goal", result.steps_to_goal ? nlohmann::json(*result.steps_to_goal) : nlohmann::json(nullptr)},
    {"min_distance_overall", finite_or_null(result.min_distance_overall)},
    {"steps", result.controls.size()},
    {"overtook_all", result.overtook_all()},
    {"stayed_on_road", result.stayed_on_road()},
    {"min_boundary_margin", finite_or_null(min_margin)},
    {"failure", result.failure.empty() ? nlohmann::json(nullptr) : nlohmann::json(result.failure)},
  };
  return doc;
}

void write_json(const std::filesystem::path & path, const nlohmann::json & doc)
{
  std::ofstream out = open_output(path);
  out << doc.dump(2) << '\n';
}

}  // namespace capnmpc::cli
