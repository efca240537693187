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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "s2r/data/manifest.hpp"
#include "s2r/lane/classes.hpp"
#include "s2r/lane/labels.hpp"
#include "s2r/simulanes/backend.hpp"
#include "s2r/simulanes/weather.hpp"

namespace s2r::simulanes {

struct GenerationRequest {
  int total_frames = 100;
  std::vector<std::string> maps;  // empty = default_map_list()
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  WeatherParams weather;
  int max_lanes = 4;
  // Label rows in native image pixels; empty = TuSimple rows rescaled to
  // the camera height.
  std::vector<int> h_samples;

  double tick_s = 0.1;
  double capture_interval_s = 1.0;
  double waypoints_behind_m = 5.0;
  double waypoints_ahead_m = 100.0;
  double waypoint_spacing_m = 0.5;
  double stall_min_displacement_m = 0.5;
  double stall_timeout_s = 5.0;
  double min_frame_separation_m = 0.05;
  double max_label_dx_px = 80.0;  // per h_sample step; larger jumps are flagged

  double val_fraction = 0.0;
  double test_fraction = 0.0;
};

struct GenerationReport {
  std::vector<std::string> maps;
  std::vector<int> frames_per_map;
  int respawns = 0;
  int flagged_labels = 0;
  std::filesystem::path manifest_path;
};

// TuSimple h_samples (160..710 every 10 on a 720-row image) rescaled.
std::vector<int> default_h_samples(int image_height);

// Slots [LL, L, R, RR] around the ego lane; lanes the road does not have
// are absent.
lane::LanePointLabel build_label(const LaneNeighbourhood& hood, const Camera& camera,
                                 std::span<const int> h_samples, int max_lanes);

GenerationReport generate_dataset(SimulatorBackend& backend, const GenerationRequest& request,
                                  const lane::LaneClassMapping& classes);

}  // namespace s2r::simulanes
