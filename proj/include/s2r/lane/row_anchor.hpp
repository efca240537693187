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

#include <vector>

#include <json.hpp>

namespace s2r::lane {

struct ImageSize {
  int height = 0;
  int width = 0;

  bool operator==(const ImageSize&) const = default;
};

// Row-anchor geometry shared by labels and predictions: C lane slots, h
// anchor rows (in model-input pixels) and w horizontal cells per anchor.
// Cell index w is reserved for "no lane at this anchor".
class RowAnchorConfig {
 public:
  RowAnchorConfig(int num_lanes, int num_cells, std::vector<int> anchor_rows,
                  ImageSize input_size, ImageSize native_size);

  // 4 lanes, 100 cells, 56 anchors on rows 64..284 of a 288x800 input,
  // 720x1280 native imagery.
  static RowAnchorConfig tusimple();

  // `count` anchors evenly spaced by `step` starting at `first_row`.
  static RowAnchorConfig evenly_spaced(int num_lanes, int num_cells,
                                       int first_row, int step, int count,
                                       ImageSize input_size,
                                       ImageSize native_size);

  int num_lanes() const noexcept { return num_lanes_; }
  int num_anchors() const noexcept { return static_cast<int>(anchor_rows_.size()); }
  int num_cells() const noexcept { return num_cells_; }
  const std::vector<int>& anchor_rows() const noexcept { return anchor_rows_; }
  ImageSize input_size() const noexcept { return input_size_; }
  ImageSize native_size() const noexcept { return native_size_; }

  // Width of one gridding cell in input pixels.
  double cell_width() const noexcept {
    return static_cast<double>(input_size_.width) / num_cells_;
  }
  double x_input_to_native(double x) const noexcept {
    return x * native_size_.width / input_size_.width;
  }
  double x_native_to_input(double x) const noexcept {
    return x * input_size_.width / native_size_.width;
  }
  double anchor_native_row(int j) const noexcept {
    return static_cast<double>(anchor_rows_[j]) * native_size_.height /
           input_size_.height;
  }
  // Anchor rows mapped into native pixels, rounded to the nearest row.
  std::vector<int> native_h_samples() const;

  // Number of entries in one location volume, C * h * (w + 1).
  int volume_size() const noexcept {
    return num_lanes_ * num_anchors() * (num_cells_ + 1);
  }

  bool operator==(const RowAnchorConfig&) const = default;

 private:
  int num_lanes_;
  int num_cells_;
  std::vector<int> anchor_rows_;
  ImageSize input_size_;
  ImageSize native_size_;
};

void to_json(nlohmann::json& j, const RowAnchorConfig& cfg);
RowAnchorConfig row_anchor_config_from_json(const nlohmann::json& j);

}  // namespace s2r::lane
