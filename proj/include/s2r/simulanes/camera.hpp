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
#include <span>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "s2r/simulanes/geometry.hpp"

namespace s2r::simulanes {

struct PinholeIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Square pixels, principal point at the image centre.
  static PinholeIntrinsics from_fov(int width, int height, double horizontal_fov_deg);
  void validate() const;
};

// Camera placement in the world. Yaw is the heading of the optical axis
// (0 = +x, counter-clockwise); positive pitch tilts the camera down; roll
// turns the image clockwise about the optical axis.
struct CameraPose {
  Point3 position = Point3::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  // Rows are the camera axes (right, down, forward) in world coordinates.
  Eigen::Matrix3d world_to_camera() const;
};

struct Camera {
  PinholeIntrinsics intrinsics;
  CameraPose pose;

  // Point in camera coordinates (x right, y down, z forward).
  Point3 to_camera(const Point3& world) const;
  // Pixel (u, v), or nothing when the point is not in front of the camera
  // (depth below `near`).
  std::optional<Eigen::Vector2d> project(const Point3& world, double near = 0.1) const;
};

void to_json(nlohmann::json& j, const PinholeIntrinsics& k);
void from_json(const nlohmann::json& j, PinholeIntrinsics& k);
void to_json(nlohmann::json& j, const CameraPose& p);
void from_json(const nlohmann::json& j, CameraPose& p);

struct FittedLane {
  std::vector<Eigen::Vector2d> projected;  // visible points sorted by row
  std::vector<double> xs;                  // per anchor row, or lane::kAbsent
};

// Projects a boundary polyline into the image and fits x as a function of
// the image row: natural cubic spline with >= 4 points, linear interpolation
// with 2 or 3. Anchor rows outside the fitted row span, or fitted x outside
// the image, are absent; fewer than 2 visible points leave the lane absent.
FittedLane project_and_fit(std::span<const Point3> boundary, const Camera& camera,
                           std::span<const int> anchor_rows, double near = 0.1);

// True when adjacent present anchors never jump by more than `max_dx` pixels.
bool label_is_continuous(std::span<const double> xs, double max_dx);

}  // namespace s2r::simulanes
