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

#include "s2r/lane/labels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "s2r/errors.hpp"

namespace s2r::lane {

bool Lane::present() const noexcept {
  return std::any_of(xs.begin(), xs.end(), [](double x) { return x >= 0.0; });
}

std::size_t Lane::point_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(xs.begin(), xs.end(), [](double x) { return x >= 0.0; }));
}

void LanePointLabel::validate(int native_width) const {
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const auto& lane = lanes[i];
    if (lane.xs.size() != h_samples.size()) {
      throw ValidationError("lane " + std::to_string(i) + " has " +
                            std::to_string(lane.xs.size()) + " points but " +
                            std::to_string(h_samples.size()) + " h_samples");
    }
    for (double x : lane.xs) {
      if (x == kAbsent) continue;
      if (!(x >= 0.0 && x < native_width)) {
        throw ValidationError("lane " + std::to_string(i) + " has x=" +
                              std::to_string(x) + " outside the image");
      }
    }
  }
}

TargetGrid encode_targets(const LanePointLabel& label,
                          const RowAnchorConfig& cfg,
                          const LaneClassMapping* mapping) {
  const int C = cfg.num_lanes();
  const int h = cfg.num_anchors();
  const int w = cfg.num_cells();
  if (static_cast<int>(label.lanes.size()) > C) {
    throw ConfigError("label has " + std::to_string(label.lanes.size()) +
                      " lanes but the grid has " + std::to_string(C) +
                      " slots; assign slots first");
  }

  // Which h_sample feeds each anchor.
  std::vector<std::size_t> source_row(h);
  for (int j = 0; j < h; ++j) {
    const double row = cfg.anchor_native_row(j);
    auto it = std::find_if(label.h_samples.begin(), label.h_samples.end(),
                           [row](int s) { return std::abs(s - row) <= 0.5; });
    if (it == label.h_samples.end()) {
      throw ConfigError("label rows do not cover anchor row " +
                        std::to_string(cfg.anchor_rows()[j]) +
                        " (native row " + std::to_string(row) + ")");
    }
    source_row[j] = static_cast<std::size_t>(it - label.h_samples.begin());
  }

  TargetGrid grid;
  grid.num_lanes = C;
  grid.num_anchors = h;
  grid.num_cells = w;
  grid.cells.assign(static_cast<std::size_t>(C) * h, w);
  grid.lane_class.assign(C, -1);
  grid.present.assign(C, 0);

  const double input_width = cfg.input_size().width;
  for (int i = 0; i < static_cast<int>(label.lanes.size()); ++i) {
    const Lane& lane = label.lanes[i];
    if (lane.xs.size() != label.h_samples.size()) {
      throw ValidationError("lane " + std::to_string(i) +
                            " point count differs from h_samples");
    }
    bool any = false;
    for (int j = 0; j < h; ++j) {
      const double x = lane.xs[source_row[j]];
      if (x < 0.0) continue;
      const double x_in = cfg.x_native_to_input(x);
      if (x_in >= input_width) continue;
      int cell = static_cast<int>(std::floor(x_in / cfg.cell_width()));
      cell = std::clamp(cell, 0, w - 1);
      grid.cells[static_cast<std::size_t>(i) * h + j] = cell;
      any = true;
    }
    grid.present[i] = any ? 1 : 0;
    if (any && mapping != nullptr && lane.raw_class != kUnlabelledClass) {
      grid.lane_class[i] = static_cast<int>(mapping->map(lane.raw_class));
    }
  }
  return grid;
}

LanePointLabel decode_prediction(std::span<const double> probs,
                                 const RowAnchorConfig& cfg, DecodeMode mode) {
  const int C = cfg.num_lanes();
  const int h = cfg.num_anchors();
  const int w = cfg.num_cells();
  const std::size_t stride = static_cast<std::size_t>(w) + 1;
  if (probs.size() != static_cast<std::size_t>(cfg.volume_size())) {
    throw ShapeError("probability volume has " + std::to_string(probs.size()) +
                     " entries, expected " + std::to_string(cfg.volume_size()));
  }

  LanePointLabel out;
  out.h_samples = cfg.native_h_samples();
  out.lanes.resize(C);
  for (int i = 0; i < C; ++i) {
    out.lanes[i].xs.assign(h, kAbsent);
    for (int j = 0; j < h; ++j) {
      const auto slice = probs.subspan(
          (static_cast<std::size_t>(i) * h + j) * stride, stride);
      double total = 0.0;
      for (double p : slice) {
        if (!(p >= 0.0)) {
          throw ValidationError("negative or NaN probability at lane " +
                                std::to_string(i) + ", anchor " +
                                std::to_string(j));
        }
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-5) {
        throw ValidationError("probabilities at lane " + std::to_string(i) +
                              ", anchor " + std::to_string(j) + " sum to " +
                              std::to_string(total));
      }
      const auto argmax = static_cast<int>(
          std::max_element(slice.begin(), slice.end()) - slice.begin());
      if (argmax == w) continue;

      double x_in = (argmax + 0.5) * cfg.cell_width();
      if (mode == DecodeMode::kExpectation) {
        double mass = 0.0;
        double moment = 0.0;
        for (int k = 0; k < w; ++k) {
          mass += slice[k];
          moment += slice[k] * (k + 0.5);
        }
        if (mass > 0.0) x_in = moment / mass * cfg.cell_width();
      }
      out.lanes[i].xs[j] = cfg.x_input_to_native(x_in);
    }
  }
  return out;
}

std::vector<SuperClass> decode_classes(std::span<const double> class_logits,
                                       int num_lanes) {
  if (class_logits.size() != static_cast<std::size_t>(num_lanes) * 2) {
    throw ShapeError("class logits must hold 2 values per lane");
  }
  std::vector<SuperClass> out(num_lanes);
  for (int i = 0; i < num_lanes; ++i) {
    out[i] = class_logits[2 * i + 1] > class_logits[2 * i]
                 ? SuperClass::kContinuous
                 : SuperClass::kDashed;
  }
  return out;
}

LanePointLabel assign_lane_slots(const LanePointLabel& label, int num_lanes,
                                 int native_width) {
  struct Candidate {
    double bottom_x;
    std::size_t index;
  };
  std::vector<Candidate> left, right;
  const double centre = native_width / 2.0;
  for (std::size_t k = 0; k < label.lanes.size(); ++k) {
    const auto& xs = label.lanes[k].xs;
    // Lowest labelled row is the last valid entry (h_samples ascend).
    auto it = std::find_if(xs.rbegin(), xs.rend(), [](double x) { return x >= 0.0; });
    if (it == xs.rend()) continue;
    (*it < centre ? left : right).push_back({*it, k});
  }
  // Nearest to the ego centre first on each side.
  std::sort(left.begin(), left.end(),
            [](const Candidate& a, const Candidate& b) { return a.bottom_x > b.bottom_x; });
  std::sort(right.begin(), right.end(),
            [](const Candidate& a, const Candidate& b) { return a.bottom_x < b.bottom_x; });

  const int per_side_left = num_lanes / 2;
  const int per_side_right = num_lanes - per_side_left;
  LanePointLabel out;
  out.h_samples = label.h_samples;
  out.lanes.assign(num_lanes, Lane{std::vector<double>(label.h_samples.size(), kAbsent),
                                   kUnlabelledClass});
  for (int k = 0; k < per_side_left && k < static_cast<int>(left.size()); ++k) {
    out.lanes[per_side_left - 1 - k] = label.lanes[left[k].index];
  }
  for (int k = 0; k < per_side_right && k < static_cast<int>(right.size()); ++k) {
    out.lanes[per_side_left + k] = label.lanes[right[k].index];
  }
  return out;
}

}  // namespace s2r::lane
