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

#include "s2r/lane/row_anchor.hpp"

#include <cmath>
#include <string>

#include "s2r/errors.hpp"

namespace s2r::lane {

namespace {
constexpr int kMaxLanes = 4;
}

RowAnchorConfig::RowAnchorConfig(int num_lanes, int num_cells,
                                 std::vector<int> anchor_rows,
                                 ImageSize input_size, ImageSize native_size)
    : num_lanes_(num_lanes),
      num_cells_(num_cells),
      anchor_rows_(std::move(anchor_rows)),
      input_size_(input_size),
      native_size_(native_size) {
  if (num_lanes_ < 1 || num_lanes_ > kMaxLanes) {
    throw ConfigError("num_lanes must be in [1, 4], got " +
                      std::to_string(num_lanes_));
  }
  if (num_cells_ < 2) throw ConfigError("num_cells must be >= 2");
  if (anchor_rows_.size() < 2) throw ConfigError("need at least 2 anchor rows");
  if (input_size_.height <= 0 || input_size_.width <= 0 ||
      native_size_.height <= 0 || native_size_.width <= 0) {
    throw ConfigError("image sizes must be positive");
  }
  for (std::size_t j = 0; j < anchor_rows_.size(); ++j) {
    if (anchor_rows_[j] < 0 || anchor_rows_[j] >= input_size_.height) {
      throw ConfigError("anchor row " + std::to_string(anchor_rows_[j]) +
                        " outside input height");
    }
    if (j > 0 && anchor_rows_[j] <= anchor_rows_[j - 1]) {
      throw ConfigError("anchor rows must be strictly increasing");
    }
  }
}

RowAnchorConfig RowAnchorConfig::tusimple() {
  return evenly_spaced(4, 100, 64, 4, 56, {288, 800}, {720, 1280});
}

RowAnchorConfig RowAnchorConfig::evenly_spaced(int num_lanes, int num_cells,
                                               int first_row, int step,
                                               int count, ImageSize input_size,
                                               ImageSize native_size) {
  std::vector<int> rows;
  rows.reserve(count);
  for (int j = 0; j < count; ++j) rows.push_back(first_row + j * step);
  return RowAnchorConfig(num_lanes, num_cells, std::move(rows), input_size,
                         native_size);
}

std::vector<int> RowAnchorConfig::native_h_samples() const {
  std::vector<int> rows;
  rows.reserve(anchor_rows_.size());
  for (int j = 0; j < num_anchors(); ++j) {
    rows.push_back(static_cast<int>(std::lround(anchor_native_row(j))));
  }
  return rows;
}

void to_json(nlohmann::json& j, const RowAnchorConfig& cfg) {
  j = nlohmann::json{
      {"num_lanes", cfg.num_lanes()},
      {"num_cells", cfg.num_cells()},
      {"anchor_rows", cfg.anchor_rows()},
      {"input_size", {cfg.input_size().height, cfg.input_size().width}},
      {"native_size", {cfg.native_size().height, cfg.native_size().width}}};
}

RowAnchorConfig row_anchor_config_from_json(const nlohmann::json& j) {
  try {
    const auto& in = j.at("input_size");
    const auto& nat = j.at("native_size");
    return RowAnchorConfig(j.at("num_lanes").get<int>(),
                           j.at("num_cells").get<int>(),
                           j.at("anchor_rows").get<std::vector<int>>(),
                           {in.at(0).get<int>(), in.at(1).get<int>()},
                           {nat.at(0).get<int>(), nat.at(1).get<int>()});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad row-anchor config: ") + e.what());
  }
}

}  // namespace s2r::lane
