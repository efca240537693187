// Copyright 2026 The sim2real-lanes Authors. All Rights Reserved.
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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>
#include <opencv2/core.hpp>

#include "s2r/simulanes/camera.hpp"
#include "s2r/simulanes/geometry.hpp"
#include "s2r/simulanes/weather.hpp"

namespace s2r::simulanes {

struct EgoState {
  double time_s = 0.0;
  Point3 position = Point3::Zero();
  double yaw = 0.0;
};

// Centre waypoints of one driving lane plus the marking classes (raw ids)
// painted on its two boundaries.
struct LaneWaypoints {
  std::vector<Point3> centers;
  std::vector<double> headings;
  double width = 0.0;
  int left_marking = -1;
  int right_marking = -1;
};

// Lanes next to the ego vehicle ordered left to right; `ego_index` is the
// lane the vehicle drives in.
struct LaneNeighbourhood {
  std::vector<LaneWaypoints> lanes;
  int ego_index = 0;
};

// What the dataset generator needs from a driving simulator.
class SimulatorBackend {
 public:
  virtual ~SimulatorBackend() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::string> available_maps() = 0;
  virtual void load_map(const std::string& map, std::uint64_t seed) = 0;
  // Places the ego vehicle (and roaming actors) at a random location.
  virtual void respawn(std::uint64_t seed) = 0;
  virtual EgoState tick(double dt) = 0;
  virtual void apply_weather(const WeatherState& weather) = 0;
  virtual LaneNeighbourhood lanes_near_ego(double behind_m, double ahead_m,
                                           double spacing_m) = 0;
  virtual Camera camera() = 0;
  virtual cv::Mat capture() = 0;
  // Backend-specific description of the current frame, stored alongside
  // the labels.
  virtual nlohmann::json frame_metadata() { return nlohmann::json::object(); }
};

}  // namespace s2r::simulanes
