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

#include <span>
#include <vector>

#include "s2r/simulanes/geometry.hpp"

namespace s2r::simulanes {

struct PoseStamp {
  double time_s = 0.0;
  Point3 position = Point3::Zero();
};

enum class StallDecision { kKeep, kRespawn };

// Respawn when the vehicle has not moved `min_displacement` metres away from
// where it was `timeout_s` ago, at any point since. Histories shorter than
// the timeout are kept.
StallDecision stall_check(std::span<const PoseStamp> history,
                          double min_displacement_m = 0.5,
                          double timeout_s = 5.0);

// Splits n frames across maps as evenly as possible (earlier maps take the
// remainder). Throws ConfigError when n < number of maps.
std::vector<int> divide_frames(int total_frames, int num_maps);

}  // namespace s2r::simulanes
