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
#include <random>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "s2r/lane/classes.hpp"
#include "s2r/simulanes/backend.hpp"

namespace s2r::simulanes {

// Flat multi-lane road generated from a map name and seed. The road centre
// line has a smoothly varying curvature; it is tabulated every 0.25 m and
// linearly interpolated in between.
class ProceduralRoad {
 public:
  static ProceduralRoad make(const std::string& map, std::uint64_t seed,
                             const lane::LaneClassMapping& classes);

  int num_lanes() const noexcept { return num_lanes_; }
  double lane_width() const noexcept { return lane_width_; }
  double length() const noexcept { return step_ * (xs_.size() - 1); }

  // Lateral offset (positive = left) of lane k's centre, k = 0 leftmost.
  double lane_offset(int k) const noexcept;
  // Offset of boundary b, b = 0 left road edge ... num_lanes right edge.
  double boundary_offset(int b) const noexcept;
  int boundary_class(int b) const { return boundary_classes_.at(b); }

  Point3 point_at(double s, double lateral) const;
  double heading_at(double s) const;

 private:
  int num_lanes_ = 2;
  double lane_width_ = 3.5;
  double step_ = 0.25;
  std::vector<double> xs_, ys_, yaws_;
  std::vector<int> boundary_classes_;
};

struct CameraMount {
  double height_m = 1.5;
  double pitch_deg = 4.0;
};

// Appearance knobs; `gain`/`bias` are applied per BGR channel after
// rendering (used to build colour-shifted "real" toy domains).
struct RenderStyle {
  cv::Scalar gain = cv::Scalar(1.0, 1.0, 1.0);
  cv::Scalar bias = cv::Scalar(0.0, 0.0, 0.0);
  double noise_sigma = 4.0;
};

struct ProceduralOptions {
  PinholeIntrinsics intrinsics = PinholeIntrinsics::from_fov(1280, 720, 70.0);
  CameraMount mount;
  RenderStyle style;
  int num_vehicles = 3;
  double render_distance_m = 150.0;
  double stop_rate_per_s = 1.0 / 40.0;  // how often the ego stops in traffic
};

// CARLA-free backend: renders flat-ground scenes (sky, road, painted
// markings per class, vehicles, weather tint, sensor noise) whose lane
// geometry is known exactly.
class ProceduralBackend final : public SimulatorBackend {
 public:
  ProceduralBackend(ProceduralOptions options, lane::LaneClassMapping classes);

  std::string name() const override { return "procedural"; }
  std::vector<std::string> available_maps() override;
  void load_map(const std::string& map, std::uint64_t seed) override;
  void respawn(std::uint64_t seed) override;
  EgoState tick(double dt) override;
  void apply_weather(const WeatherState& weather) override;
  LaneNeighbourhood lanes_near_ego(double behind_m, double ahead_m,
                                   double spacing_m) override;
  Camera camera() override;
  cv::Mat capture() override;
  nlohmann::json frame_metadata() override;

  const ProceduralRoad& road() const { return road_; }

 private:
  struct Vehicle {
    int lane = 0;
    double s = 0.0;
    double speed = 0.0;
    cv::Scalar color;
  };

  double ego_lateral() const;
  double ego_yaw_offset() const;

  ProceduralOptions options_;
  lane::LaneClassMapping classes_;
  std::string map_;
  std::uint64_t map_seed_ = 0;
  ProceduralRoad road_;
  std::mt19937_64 rng_;
  WeatherState weather_;

  double time_s_ = 0.0;
  double s_ = 0.0;
  int lane_ = 0;
  double speed_ = 10.0;
  double stop_remaining_s_ = 0.0;
  double wobble_phase_ = 0.0;
  std::uint64_t frame_counter_ = 0;
  std::vector<Vehicle> vehicles_;
};

// Maps towns 1, 3, 4, 5, 7 and 10; towns 2 and 6 are left out.
std::vector<std::string> default_map_list();

}  // namespace s2r::simulanes
