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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "s2r/lane/classes.hpp"
#include "s2r/lane/labels.hpp"

namespace s2r::lane {

// Benchmark default: a point is correct within 20 native pixels.
inline constexpr double kDefaultWidthThresholdPx = 20.0;

struct FrameTally {
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Point tally for one frame. Predicted and ground-truth lanes are paired
// one-to-one, greedily by largest correct-point count; ties go to the
// leftmost ground-truth lane, then the lowest predicted slot.
FrameTally score_frame(const LanePointLabel& pred, const LanePointLabel& gt,
                       double width_threshold_px = kDefaultWidthThresholdPx);

// Accumulates correct / ground-truth point counts over frames.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(double width_threshold_px = kDefaultWidthThresholdPx);

  void add(const LanePointLabel& pred, const LanePointLabel& gt);

  std::size_t correct() const noexcept { return correct_; }
  std::size_t total() const noexcept { return total_; }
  const std::vector<FrameTally>& frames() const noexcept { return frames_; }

  // Throws UndefinedMetricError when no ground-truth point was seen.
  double accuracy() const;

 private:
  double threshold_;
  std::size_t correct_ = 0;
  std::size_t total_ = 0;
  std::vector<FrameTally> frames_;
};

double tusimple_accuracy(std::span<const LanePointLabel> preds,
                         std::span<const LanePointLabel> gts,
                         double width_threshold_px = kDefaultWidthThresholdPx);

// Fraction of present ground-truth lanes whose predicted super-class is
// right; lanes with no ground-truth class are skipped.
class ClassificationAccumulator {
 public:
  void add(std::span<const SuperClass> pred,
           std::span<const std::optional<SuperClass>> gt);

  std::size_t correct() const noexcept { return correct_; }
  std::size_t total() const noexcept { return total_; }
  double accuracy() const;

 private:
  std::size_t correct_ = 0;
  std::size_t total_ = 0;
};

double classification_accuracy(std::span<const SuperClass> pred,
                               std::span<const std::optional<SuperClass>> gt);

}  // namespace s2r::lane
