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

#include "s2r/data/augment.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <opencv2/imgproc.hpp>

#include "s2r/errors.hpp"

namespace s2r::data {

void AugmentationParams::validate() const {
  if (rotation_deg < 0.0 || shift_x_px < 0.0 || shift_y_px < 0.0) {
    throw ConfigError("augmentation ranges must be nonnegative");
  }
}

cv::Point2d AffineTransform::apply(cv::Point2d p) const {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  const double dx = p.x - centre.x;
  const double dy = p.y - centre.y;
  return {c * dx + s * dy + centre.x + tx, -s * dx + c * dy + centre.y + ty};
}

cv::Mat AffineTransform::matrix() const {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  cv::Mat m = (cv::Mat_<double>(2, 3) << c, s, (1 - c) * centre.x - s * centre.y + tx,
               -s, c, s * centre.x + (1 - c) * centre.y + ty);
  return m;
}

AffineTransform sample_transform(const AugmentationParams& params,
                                 cv::Size image_size, std::uint64_t seed) {
  params.validate();
  std::mt19937_64 rng(seed);
  auto draw = [&rng](double range) {
    if (range == 0.0) return 0.0;
    return std::uniform_real_distribution<double>(-range, range)(rng);
  };
  AffineTransform t;
  t.angle_deg = draw(params.rotation_deg);
  t.tx = draw(params.shift_x_px);
  t.ty = draw(params.shift_y_px);
  t.centre = {image_size.width / 2.0, image_size.height / 2.0};
  return t;
}

lane::LanePointLabel transform_label(const lane::LanePointLabel& label,
                                     const AffineTransform& t,
                                     cv::Size image_size) {
  if (t.identity()) return label;
  lane::LanePointLabel out;
  out.h_samples = label.h_samples;
  out.lanes.reserve(label.lanes.size());
  for (const auto& lane : label.lanes) {
    std::vector<cv::Point2d> moved;
    for (std::size_t r = 0; r < lane.xs.size(); ++r) {
      if (lane.xs[r] < 0.0) continue;
      moved.push_back(t.apply({lane.xs[r], static_cast<double>(label.h_samples[r])}));
    }
    lane::Lane result;
    result.raw_class = lane.raw_class;
    result.xs.assign(label.h_samples.size(), lane::kAbsent);
    for (std::size_t r = 0; r < label.h_samples.size(); ++r) {
      const double row = label.h_samples[r];
      for (std::size_t k = 0; k + 1 < moved.size(); ++k) {
        const cv::Point2d a = moved[k];
        const cv::Point2d b = moved[k + 1];
        const double lo = std::min(a.y, b.y);
        const double hi = std::max(a.y, b.y);
        if (row < lo || row > hi) continue;
        const double x = a.y == b.y ? a.x : a.x + (row - a.y) * (b.x - a.x) / (b.y - a.y);
        if (x >= 0.0 && x < image_size.width) result.xs[r] = x;
        break;
      }
    }
    out.lanes.push_back(std::move(result));
  }
  return out;
}

FrameSample apply_transform(const FrameSample& sample, const AffineTransform& t) {
  if (t.identity()) return sample;
  FrameSample out;
  out.domain = sample.domain;
  out.source = sample.source;
  cv::warpAffine(sample.image, out.image, t.matrix(), sample.image.size(),
                 cv::INTER_LINEAR, cv::BORDER_CONSTANT, cv::Scalar::all(0));
  if (sample.label) {
    out.label = transform_label(*sample.label, t, sample.image.size());
  }
  return out;
}

FrameSample augment(const FrameSample& sample, const AugmentationParams& params,
                    std::uint64_t seed) {
  return apply_transform(sample, sample_transform(params, sample.image.size(), seed));
}

}  // namespace s2r::data
