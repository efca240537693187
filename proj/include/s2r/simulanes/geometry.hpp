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

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace s2r::simulanes {

// World frame is right-handed: x east, y north, z up; metres.
using Point3 = Eigen::Vector3d;

struct LaneBoundarySample {
  std::vector<Point3> left;
  std::vector<Point3> right;
  double width = 0.0;
  int raw_class = -1;
};

// Offsets each lane-centre waypoint by W/2 perpendicular to the local heading
// in the ground plane. Headings are yaw angles in radians (0 = +x,
// counter-clockwise); when omitted they are estimated from neighbouring
// waypoints (central differences inside, one-sided at the ends).
// Throws GeometryError on fewer than 2 waypoints, W <= 0 or a repeated
// consecutive waypoint.
LaneBoundarySample lane_boundaries_from_waypoints(
    const std::vector<Point3>& centers, double width,
    const std::optional<std::vector<double>>& headings = std::nullopt);

}  // namespace s2r::simulanes
