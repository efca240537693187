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

#include <string>
#include <vector>

#include <opencv2/core.hpp>

namespace s2r::harness {

struct Curve {
  std::string label;
  std::vector<double> x, mean, stddev;
  cv::Scalar color;
};

// Mean lines with shaded +-1 stddev bands, axes and a legend.
cv::Mat plot_curves(const std::vector<Curve>& curves, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    cv::Size size = {640, 420});

}  // namespace s2r::harness
