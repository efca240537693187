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

#include "s2r/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <opencv2/imgproc.hpp>

namespace s2r::harness {

cv::Mat plot_curves(const std::vector<Curve>& curves, const std::string& title,
                    const std::string& x_label, const std::string& y_label, cv::Size size) {
  cv::Mat img(size, CV_8UC3, cv::Scalar(255, 255, 255));
  const int left = 64, right = 20, top = 36, bottom = 48;
  const cv::Rect area(left, top, size.width - left - right, size.height - top - bottom);

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      const double sd = i < c.stddev.size() ? c.stddev[i] : 0.0;
      x0 = std::min(x0, c.x[i]);
      x1 = std::max(x1, c.x[i]);
      y0 = std::min(y0, c.mean[i] - sd);
      y1 = std::max(y1, c.mean[i] + sd);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-9) y0 -= 1.0, y1 += 1.0;
  const double pad = 0.08 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  auto px = [&](double x, double y) {
    return cv::Point(area.x + static_cast<int>(std::lround((x - x0) / (x1 - x0) * area.width)),
                     area.y + area.height -
                         static_cast<int>(std::lround((y - y0) / (y1 - y0) * area.height)));
  };

  const cv::Scalar ink(40, 40, 40), grid(225, 225, 225);
  const auto font = cv::FONT_HERSHEY_SIMPLEX;
  for (int t = 0; t <= 4; ++t) {
    const double y = y0 + (y1 - y0) * t / 4.0;
    const auto p = px(x0, y);
    cv::line(img, p, {area.x + area.width, p.y}, grid, 1);
    cv::putText(img, fmt::format("{:.1f}", y), {4, p.y + 4}, font, 0.4, ink, 1, cv::LINE_AA);
  }
  for (const auto& c : curves) {
    for (double x : c.x) {
      const auto p = px(x, y0);
      cv::putText(img, fmt::format("{:g}", x), {p.x - 6, p.y + 16}, font, 0.4, ink, 1, cv::LINE_AA);
    }
  }
  cv::rectangle(img, area, ink, 1);

  // bands first so lines stay on top
  for (const auto& c : curves) {
    if (c.x.size() < 2) continue;
    std::vector<cv::Point> poly;
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      poly.push_back(px(c.x[i], c.mean[i] + (i < c.stddev.size() ? c.stddev[i] : 0.0)));
    }
    for (std::size_t i = c.x.size(); i-- > 0;) {
      poly.push_back(px(c.x[i], c.mean[i] - (i < c.stddev.size() ? c.stddev[i] : 0.0)));
    }
    cv::Mat layer = img.clone();
    cv::fillPoly(layer, std::vector<std::vector<cv::Point>>{poly}, c.color, cv::LINE_AA);
    cv::addWeighted(layer, 0.25, img, 0.75, 0.0, img);
  }
  int legend_y = top + 16;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      const auto p = px(c.x[i], c.mean[i]);
      if (i > 0) cv::line(img, px(c.x[i - 1], c.mean[i - 1]), p, c.color, 2, cv::LINE_AA);
      cv::circle(img, p, 3, c.color, cv::FILLED, cv::LINE_AA);
    }
    cv::line(img, {area.x + 10, legend_y - 4}, {area.x + 30, legend_y - 4}, c.color, 2);
    cv::putText(img, c.label, {area.x + 36, legend_y}, font, 0.45, ink, 1, cv::LINE_AA);
    legend_y += 18;
  }
  cv::putText(img, title, {left, 24}, font, 0.55, ink, 1, cv::LINE_AA);
  cv::putText(img, x_label, {area.x + area.width / 2 - 60, size.height - 10}, font, 0.45, ink, 1,
              cv::LINE_AA);
  cv::putText(img, y_label, {4, top - 8}, font, 0.4, ink, 1, cv::LINE_AA);
  return img;
}

}  // namespace s2r::harness
