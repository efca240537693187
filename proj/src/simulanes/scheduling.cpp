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

#include "s2r/simulanes/scheduling.hpp"

#include <string>

#include "s2r/errors.hpp"

namespace s2r::simulanes {

StallDecision stall_check(std::span<const PoseStamp> history,
                          double min_displacement_m, double timeout_s) {
  if (history.empty()) throw ConfigError("stall check needs a pose history");
  const double now = history.back().time_s;
  const double window_start = now - timeout_s;
  // Reference pose: the latest one at or before the window start.
  std::size_t ref = history.size();
  for (std::size_t k = 0; k < history.size(); ++k) {
    if (history[k].time_s <= window_start) ref = k;
  }
  if (ref == history.size()) return StallDecision::kKeep;
  for (std::size_t k = ref + 1; k < history.size(); ++k) {
    if ((history[k].position - history[ref].position).norm() >= min_displacement_m) {
      return StallDecision::kKeep;
    }
  }
  return StallDecision::kRespawn;
}

std::vector<int> divide_frames(int total_frames, int num_maps) {
  if (num_maps <= 0) throw ConfigError("need at least one map");
  if (total_frames < num_maps) {
    throw ConfigError("cannot divide " + std::to_string(total_frames) +
                      " frames across " + std::to_string(num_maps) + " maps");
  }
  std::vector<int> counts(num_maps, total_frames / num_maps);
  for (int k = 0; k < total_frames % num_maps; ++k) ++counts[k];
  return counts;
}

}  // namespace s2r::simulanes
