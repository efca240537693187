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
#include <span>
#include <vector>

#include "s2r/lane/classes.hpp"
#include "s2r/lane/row_anchor.hpp"

namespace s2r::lane {

// Marker for "no lane point at this row", as in TuSimple label files.
inline constexpr double kAbsent = -2.0;
// Lane carries no class annotation.
inline constexpr int kUnlabelledClass = -1;

struct Lane {
  std::vector<double> xs;  // one entry per h_sample, native pixels or kAbsent
  int raw_class = kUnlabelledClass;

  bool present() const noexcept;
  std::size_t point_count() const noexcept;
};

// Per-lane point labels in native pixel coordinates. Lane k of the vector is
// lane slot k once the label has gone through assign_lane_slots.
struct LanePointLabel {
  std::vector<int> h_samples;
  std::vector<Lane> lanes;

  // Throws ValidationError when a lane's x list does not match h_samples or
  // an x lies outside [0, native_width) without being the sentinel.
  void validate(int native_width) const;
};

// Row-anchor classification targets. Entries are lane-major:
// cells[lane * num_anchors + anchor] in [0, num_cells]; num_cells == absent.
struct TargetGrid {
  int num_lanes = 0;
  int num_anchors = 0;
  int num_cells = 0;
  std::vector<int> cells;
  std::vector<int> lane_class;       // super-class id, or -1 when unknown
  std::vector<std::uint8_t> present;

  int at(int lane, int anchor) const {
    return cells[static_cast<std::size_t>(lane) * num_anchors + anchor];
  }
};

// Quantizes the label into the row-anchor grid. `mapping` resolves per-lane
// super-class targets; without it every class target is -1.
TargetGrid encode_targets(const LanePointLabel& label,
                          const RowAnchorConfig& cfg,
                          const LaneClassMapping* mapping = nullptr);

enum class DecodeMode {
  kExpectation,  // argmax decides presence, x = expectation over the w cells
  kArgmax,       // x = centre of the argmax cell
};

// `probs` holds C * h * (w + 1) probabilities, lane-major then anchor-major.
LanePointLabel decode_prediction(std::span<const double> probs,
                                 const RowAnchorConfig& cfg,
                                 DecodeMode mode = DecodeMode::kExpectation);

// Argmax over each lane's pair of class logits (C * 2 values).
std::vector<SuperClass> decode_classes(std::span<const double> class_logits,
                                       int num_lanes);

// Reorders an arbitrary set of labelled lanes into ego-relative slots: up to
// C/2 lanes left of the image centre (outermost first) and C/2 right of it,
// using each lane's x at its lowest labelled row. Missing slots are filled
// with absent lanes so the result always has exactly C lanes.
LanePointLabel assign_lane_slots(const LanePointLabel& label, int num_lanes,
                                 int native_width);

}  // namespace s2r::lane
