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

#include "s2r/simulanes/geometry.hpp"

#include <cmath>
#include <string>

#include "s2r/errors.hpp"

namespace s2r::simulanes {

LaneBoundarySample lane_boundaries_from_waypoints(
    const std::vector<Point3>& centers, double width,
    const std::optional<std::vector<double>>& headings) {
  const std::size_t n = centers.size();
  if (n < 2) throw GeometryError("need at least 2 waypoints");
  if (!(width > 0.0)) throw GeometryError("lane width must be positive");
  if (headings && headings->size() != n) {
    throw GeometryError("heading count differs from waypoint count");
  }
  for (std::size_t k = 1; k < n; ++k) {
    if ((centers[k].head<2>() - centers[k - 1].head<2>()).norm() < 1e-9) {
      throw GeometryError("degenerate heading: waypoints " + std::to_string(k - 1) +
                          " and " + std::to_string(k) + " coincide");
    }
  }

  LaneBoundarySample out;
  out.width = width;
  out.left.reserve(n);
  out.right.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    double yaw;
    if (headings) {
      yaw = (*headings)[k];
    } else {
      const Point3& a = centers[k == 0 ? 0 : k - 1];
      const Point3& b = centers[k + 1 == n ? n - 1 : k + 1];
      yaw = std::atan2(b.y() - a.y(), b.x() - a.x());
    }
    // Unit normal pointing to the left of travel.
    const Point3 left_normal(-std::sin(yaw), std::cos(yaw), 0.0);
    out.left.push_back(centers[k] + 0.5 * width * left_normal);
    out.right.push_back(centers[k] - 0.5 * width * left_normal);
  }
  return out;
}

}  // namespace s2r::simulanes
