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

#include "capnmpc/errors.hpp"
#include "capnmpc/planner.hpp"

namespace capnmpc::scenarios {

// Lane centers sit 2.5 m either side of the centerline on the 10 m road.
namespace {
constexpr double kLane = 2.5;
}

Scenario scenario1()
{
  Scenario s;
  s.name = "scenario1";
  s.road.kind = CenterlineKind::straight;
  s.road.width = 10.0;
  s.ego_init = VehicleState{0.0, 0.0, 0.0, 0.0};
  s.goal = Point2{130.0, 0.0};
  s.reference_speed = 8.0;
  s.episode_length = 250;
  s.goal_tolerance = 2.0;
  s.obstacles = {
    Obstacle{ObstacleKind::fixed, Point2{30.0, -kLane}},
    Obstacle{ObstacleKind::fixed, Point2{60.0, kLane}},
    Obstacle{ObstacleKind::fixed, Point2{90.0, -kLane}},
  };
  return s;
}

Scenario scenario2()
{
  Scenario s;
  s.name = "scenario2";
  s.road.kind = CenterlineKind::sine;
  s.road.amplitude = 5.0;
  s.road.wavelength = 100.0;
  s.road.width = 10.0;
  const double x0 = 0.0;
  s.ego_init = VehicleState{
    x0, s.road.centerline_y(x0) - kLane, 5.0, s.road.centerline_heading(x0)};
  const double goal_x = 230.0;
  s.goal = Point2{goal_x, s.road.centerline_y(goal_x)};
  s.reference_speed = 10.0;
  s.episode_length = 250;
  s.goal_tolerance = 3.0;
  auto mover = [&](double x, double offset) {
    return Obstacle{
      ObstacleKind::moving, Point2{x, s.road.centerline_y(x) + offset}, 5.0, 20.0};
  };
  s.obstacles = {mover(30.0, -kLane), mover(90.0, kLane), mover(150.0, -kLane)};
  return s;
}

Scenario open_road()
{
  Scenario s;
  s.name = "open_road";
  s.road.kind = CenterlineKind::straight;
  s.road.width = 10.0;
  s.ego_init = VehicleState{0.0, 0.0, 0.0, 0.0};
  s.goal = Point2{60.0, 0.0};
  s.reference_speed = 8.0;
  s.episode_length = 150;
  s.goal_tolerance = 2.0;
  return s;
}

Scenario builtin(const std::string & name)
{
  if (name == "scenario1") {
    return scenario1();
  }
  if (name == "scenario2") {
    return scenario2();
  }
  if (name == "open_road") {
    return open_road();
  }
  throw ConfigError("scenario", "unknown builtin scenario '" + name + "'");
}

}  // namespace capnmpc::scenarios
