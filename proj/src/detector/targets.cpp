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

#include "s2r/detector/targets.hpp"

#include <cstring>

#include <opencv2/imgproc.hpp>

#include "s2r/errors.hpp"

namespace s2r::detector {

torch::Tensor images_to_tensor(std::span<const cv::Mat> images, lane::ImageSize input) {
  auto out = torch::empty({static_cast<int64_t>(images.size()), 3, input.height, input.width});
  for (std::size_t i = 0; i < images.size(); ++i) {
    const cv::Mat& src = images[i];
    if (src.empty() || src.type() != CV_8UC3) throw ShapeError("expected a BGR 8-bit image");
    cv::Mat resized;
    if (src.rows == input.height && src.cols == input.width) {
      resized = src;
    } else {
      cv::resize(src, resized, cv::Size(input.width, input.height), 0, 0, cv::INTER_LINEAR);
    }
    cv::Mat f;
    resized.convertTo(f, CV_32FC3, 1.0 / 127.5, -1.0);
    auto hwc = torch::from_blob(f.data, {input.height, input.width, 3}, torch::kFloat32);
    out[i].copy_(hwc.permute({2, 0, 1}));
  }
  return out;
}

cv::Mat tensor_to_image(const torch::Tensor& chw) {
  if (chw.dim() != 3 || chw.size(0) != 3) throw ShapeError("expected a [3, H, W] tensor");
  auto hwc = ((chw.detach().to(torch::kFloat32).cpu() + 1.0) * 127.5)
                 .clamp(0, 255)
                 .round()
                 .to(torch::kUInt8)
                 .permute({1, 2, 0})
                 .contiguous();
  cv::Mat img(static_cast<int>(hwc.size(0)), static_cast<int>(hwc.size(1)), CV_8UC3);
  std::memcpy(img.data, hwc.data_ptr(), hwc.numel());
  return img;
}

cv::Mat rasterize_segmentation(const lane::LanePointLabel& label,
                               const lane::RowAnchorConfig& cfg, int stroke_px) {
  const auto in = cfg.input_size();
  const auto native = cfg.native_size();
  if (stroke_px < 1) throw ConfigError("segmentation stroke must be at least 1 px");
  cv::Mat seg(in.height / 8, in.width / 8, CV_8UC1, cv::Scalar(0));
  const double sx = static_cast<double>(in.width) / native.width / 8.0;
  const double sy = static_cast<double>(in.height) / native.height / 8.0;
  const int slots = std::min<int>(label.lanes.size(), cfg.num_lanes());
  // Thin polyline per lane, widened by a square dilation so near-vertical
  // lanes come out exactly `stroke_px` wide.
  const cv::Mat kernel =
      cv::getStructuringElement(cv::MORPH_RECT, cv::Size(stroke_px, stroke_px));
  cv::Mat mask(seg.size(), CV_8UC1);
  for (int k = 0; k < slots; ++k) {
    const auto& lane = label.lanes[k];
    mask.setTo(0);
    std::vector<cv::Point> run;
    auto flush = [&] {
      if (run.size() >= 2) {
        cv::polylines(mask, run, false, cv::Scalar(255), 1, cv::LINE_8);
      } else if (run.size() == 1) {
        cv::circle(mask, run[0], 0, cv::Scalar(255), cv::FILLED, cv::LINE_8);
      }
      run.clear();
    };
    for (std::size_t a = 0; a < lane.xs.size(); ++a) {
      if (lane.xs[a] == lane::kAbsent) {
        flush();
        continue;
      }
      run.emplace_back(static_cast<int>(std::lround(lane.xs[a] * sx)),
                       static_cast<int>(std::lround(label.h_samples[a] * sy)));
    }
    flush();
    if (stroke_px > 1) cv::dilate(mask, mask, kernel);
    seg.setTo(cv::Scalar(k + 1), mask);
  }
  return seg;
}

TargetBatch make_targets(std::span<const lane::LanePointLabel> labels,
                         const lane::RowAnchorConfig& cfg, const lane::LaneClassMapping* mapping,
                         int seg_stroke_px) {
  const int64_t b = static_cast<int64_t>(labels.size());
  const int c = cfg.num_lanes(), h = cfg.num_anchors();
  const auto in = cfg.input_size();
  TargetBatch t;
  t.loc = torch::empty({b, c, h}, torch::kInt64);
  t.cls = torch::full({b, c}, -1, torch::kInt64);
  t.cls_mask = torch::zeros({b, c}, torch::kBool);
  t.seg = torch::empty({b, in.height / 8, in.width / 8}, torch::kInt64);
  auto loc = t.loc.accessor<int64_t, 3>();
  auto cls = t.cls.accessor<int64_t, 2>();
  auto mask = t.cls_mask.accessor<bool, 2>();
  for (int64_t i = 0; i < b; ++i) {
    const auto grid = lane::encode_targets(labels[i], cfg, mapping);
    for (int k = 0; k < c; ++k) {
      for (int j = 0; j < h; ++j) loc[i][k][j] = grid.at(k, j);
      if (grid.present[k] && grid.lane_class[k] >= 0) {
        cls[i][k] = grid.lane_class[k];
        mask[i][k] = true;
      }
    }
    cv::Mat seg = rasterize_segmentation(labels[i], cfg, seg_stroke_px);
    cv::Mat seg64;
    seg.convertTo(seg64, CV_64F);
    auto src = torch::from_blob(seg64.data, {seg.rows, seg.cols}, torch::kFloat64);
    t.seg[i].copy_(src.to(torch::kInt64));
  }
  return t;
}

}  // namespace s2r::detector
