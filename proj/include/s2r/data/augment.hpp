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

#include <opencv2/core.hpp>

#include "s2r/data/dataset.hpp"

namespace s2r::data {

// Uniform ranges: rotation in [-rotation_deg, rotation_deg] about the image
// centre, shifts in native pixels.
struct AugmentationParams {
  double rotation_deg = 6.0;
  double shift_x_px = 100.0;
  double shift_y_px = 30.0;

  static AugmentationParams none() { return {0.0, 0.0, 0.0}; }
  void validate() const;
};

// Rotation about `centre` followed by a translation; matches the matrix
// convention of cv::getRotationMatrix2D (positive angle rotates the image
// content counter-clockwise on screen).
struct AffineTransform {
  double angle_deg = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  cv::Point2d centre;

  bool identity() const noexcept { return angle_deg == 0.0 && tx == 0.0 && ty == 0.0; }
  cv::Point2d apply(cv::Point2d p) const;
  cv::Mat matrix() const;  // 2x3, CV_64F
};

AffineTransform sample_transform(const AugmentationParams& params,
                                 cv::Size image_size, std::uint64_t seed);

// Moves label points through `t` and re-reads each lane at the original
// h_samples by linear interpolation along the moved polyline. Rows the moved
// lane does not span, and points leaving [0, width), become absent.
lane::LanePointLabel transform_label(const lane::LanePointLabel& label,
                                     const AffineTransform& t,
                                     cv::Size image_size);

FrameSample apply_transform(const FrameSample& sample, const AffineTransform& t);

// Same geometric transform on image and labels; deterministic in `seed`.
FrameSample augment(const FrameSample& sample, const AugmentationParams& params,
                    std::uint64_t seed);

}  // namespace s2r::data
