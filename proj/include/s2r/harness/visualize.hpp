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

#include <filesystem>
#include <string>

#include <opencv2/core.hpp>

#include "s2r/data/dataset.hpp"
#include "s2r/detector/evaluate.hpp"

namespace s2r::harness {

inline const cv::Scalar kContinuousColor{0, 0, 255};  // red (BGR)
inline const cv::Scalar kDashedColor{0, 255, 0};      // green

struct OverlayOptions {
  int point_radius = 3;
  int line_thickness = 2;
  int banner_height = 18;
};

// Lane points and connecting segments coloured by class; absent lanes are
// not drawn. The banner is a dark strip across the top rows holding `banner`.
cv::Mat visualize(const cv::Mat& frame, const detector::FramePrediction& prediction,
                  const std::string& banner, const OverlayOptions& options = {});

// Predicts every frame (up to `limit`) and writes overlays as PNG files.
int render_predictions(const detector::ForwardFn& forward, const data::Dataset& ds,
                       const lane::RowAnchorConfig& cfg, const std::filesystem::path& out_dir,
                       std::size_t limit = 0);

}  // namespace s2r::harness
