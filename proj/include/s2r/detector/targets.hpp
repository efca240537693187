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

#include <opencv2/core.hpp>
#include <torch/torch.h>

#include "s2r/detector/losses.hpp"
#include "s2r/lane/classes.hpp"
#include "s2r/lane/labels.hpp"

namespace s2r::detector {

// Resizes to the model input and maps [0, 255] to [-1, 1]. Channel order is
// kept (BGR). Result: float32 [B, 3, H, W].
torch::Tensor images_to_tensor(std::span<const cv::Mat> images, lane::ImageSize input);
// Inverse of images_to_tensor for one image (values clamped to [0, 255]).
cv::Mat tensor_to_image(const torch::Tensor& chw);

// Per-lane instance map at 1/8 of the input resolution: 0 background, slot
// k drawn as class k+1 with `stroke_px` wide polylines (later slots on top).
cv::Mat rasterize_segmentation(const lane::LanePointLabel& label,
                               const lane::RowAnchorConfig& cfg, int stroke_px = 5);

TargetBatch make_targets(std::span<const lane::LanePointLabel> labels,
                         const lane::RowAnchorConfig& cfg,
                         const lane::LaneClassMapping* mapping, int seg_stroke_px = 5);

}  // namespace s2r::detector
