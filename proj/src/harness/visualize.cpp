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

#include "s2r/harness/visualize.hpp"

#include <cmath>

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "s2r/detector/targets.hpp"
#include "s2r/errors.hpp"

namespace s2r::harness {

namespace fs = std::filesystem;

cv::Mat visualize(const cv::Mat& frame, const detector::FramePrediction& prediction,
                  const std::string& banner, const OverlayOptions& options) {
  if (frame.empty() || frame.type() != CV_8UC3) throw ShapeError("visualize expects an 8-bit BGR frame");
  cv::Mat canvas(frame.rows + options.banner_height, frame.cols, CV_8UC3, cv::Scalar(0, 0, 0));
  cv::Mat body = canvas.rowRange(options.banner_height, canvas.rows);
  frame.copyTo(body);

  const auto& label = prediction.lanes;
  for (std::size_t k = 0; k < label.lanes.size(); ++k) {
    const bool dashed = k < prediction.classes.size() && prediction.classes[k] == lane::SuperClass::kDashed;
    const cv::Scalar color = dashed ? kDashedColor : kContinuousColor;
    const auto& xs = label.lanes[k].xs;
    std::vector<cv::Point> pts;
    for (std::size_t r = 0; r < xs.size() && r < label.h_samples.size(); ++r) {
      if (xs[r] == lane::kAbsent) continue;
      pts.emplace_back(static_cast<int>(std::lround(xs[r])), label.h_samples[r]);
    }
    if (pts.size() > 1) cv::polylines(body, pts, false, color, options.line_thickness, cv::LINE_AA);
    for (const auto& p : pts) cv::circle(body, p, options.point_radius, color, cv::FILLED);
  }
  if (options.banner_height > 0 && !banner.empty()) {
    cv::putText(canvas, banner, {4, options.banner_height - 5}, cv::FONT_HERSHEY_SIMPLEX, 0.45,
                cv::Scalar(255, 255, 255), 1, cv::LINE_AA);
  }
  return canvas;
}

int render_predictions(const detector::ForwardFn& forward, const data::Dataset& ds,
                       const lane::RowAnchorConfig& cfg, const fs::path& out_dir,
                       std::size_t limit) {
  fs::create_directories(out_dir);
  const std::size_t n = limit == 0 ? ds.size() : std::min(limit, ds.size());
  torch::NoGradGuard guard;
  int written = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = ds.samples[i];
    const std::vector<cv::Mat> one{s.image};
    const auto pred = detector::predict(forward(detector::images_to_tensor(one, cfg.input_size())), cfg);
    std::size_t present = 0;
    for (const auto& l : pred.front().lanes.lanes) present += l.present();
    const auto banner = fmt::format("{} | {} lanes", s.source.empty() ? fmt::format("#{}", i) : fs::path(s.source).filename().string(),
                                    present);
    const auto path = out_dir / fmt::format("frame_{:05d}.png", i);
    if (!cv::imwrite(path.string(), visualize(s.image, pred.front(), banner))) {
      throw Error("cannot write " + path.string());
    }
    ++written;
  }
  return written;
}

}  // namespace s2r::harness
