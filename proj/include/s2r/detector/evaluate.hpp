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

#include <functional>
#include <optional>
#include <vector>

#include <torch/torch.h>

#include "s2r/data/dataset.hpp"
#include "s2r/detector/model.hpp"
#include "s2r/lane/labels.hpp"

namespace s2r::detector {

// Image batch in [-1, 1] -> detector output. Lets evaluation run through an
// encoder first (generative strategies).
using ForwardFn = std::function<DetectorOutput(const torch::Tensor&)>;

struct FramePrediction {
  lane::LanePointLabel lanes;              // native pixels on the anchor rows
  std::vector<lane::SuperClass> classes;   // one per slot
};

std::vector<FramePrediction> predict(const DetectorOutput& out, const lane::RowAnchorConfig& cfg);

// Ground truth resampled onto the anchor rows (rows without a label within
// half a pixel become absent).
lane::LanePointLabel align_to_anchor_rows(const lane::LanePointLabel& gt,
                                          const lane::RowAnchorConfig& cfg);

struct EvalResult {
  double det_acc = 0.0;
  std::optional<double> cls_acc;  // empty when no ground-truth lane has a class
  std::size_t frames = 0;
};

// Runs in no-grad inference mode over labelled frames of `ds`.
EvalResult evaluate(const ForwardFn& forward, const data::Dataset& ds,
                    const lane::RowAnchorConfig& cfg, int batch_size = 8);

}  // namespace s2r::detector
