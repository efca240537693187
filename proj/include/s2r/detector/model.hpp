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

#include <optional>

#include <json.hpp>
#include <torch/torch.h>

#include "s2r/lane/row_anchor.hpp"

namespace s2r::detector {

struct DetectorConfig {
  lane::RowAnchorConfig anchors = lane::RowAnchorConfig::tusimple();
  int in_channels = 3;
  // 1 for images; 4 when fed stride-4 latent codes of the translators.
  int input_stride = 1;
  int base_width = 16;      // stage widths are base, 2x, 4x, 8x
  int pool_channels = 8;    // 1x1 reduction before flattening
  int fc_hidden = 256;
  int cls_hidden = 128;
  int num_classes = 2;
  bool aux_seg = true;

  // Spatial size the network actually sees.
  lane::ImageSize feature_input() const;
  void validate() const;
};

void to_json(nlohmann::json& j, const DetectorConfig& cfg);
DetectorConfig detector_config_from_json(const nlohmann::json& j);

struct DetectorOutput {
  torch::Tensor loc;       // [B, C, h, w+1] logits
  torch::Tensor cls;       // [B, C, num_classes] logits
  torch::Tensor seg;       // [B, C+1, H/8, W/8] logits; undefined when disabled or eval
  torch::Tensor features;  // [B, 8*base, H/32, W/32] backbone output
};

class ResidualBlockImpl : public torch::nn::Module {
 public:
  ResidualBlockImpl(int in, int out, int stride);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d conv1{nullptr}, conv2{nullptr}, skip{nullptr};
  torch::nn::GroupNorm norm1{nullptr}, norm2{nullptr}, skip_norm{nullptr};
};
TORCH_MODULE(ResidualBlock);

// Residual backbone to stride 32 with a row-anchor location head, a lane
// classification head on the same flattened feature, and an auxiliary
// segmentation head fused from the stride 8/16/32 taps.
class DetectorImpl : public torch::nn::Module {
 public:
  explicit DetectorImpl(DetectorConfig cfg);

  // Shape-checked; the segmentation head only runs in training mode.
  DetectorOutput forward(const torch::Tensor& x);
  torch::Tensor backbone(const torch::Tensor& x);
  // Heads only, from backbone features (used by the shared-encoder setup).
  DetectorOutput heads(const torch::Tensor& features);

  const DetectorConfig& config() const noexcept { return cfg_; }

 private:
  DetectorConfig cfg_;
  torch::nn::Sequential stem{nullptr};
  torch::nn::Sequential stage1{nullptr}, stage2{nullptr}, stage3{nullptr}, stage4{nullptr};
  torch::nn::Conv2d pool{nullptr};
  torch::nn::Linear fc1{nullptr}, fc_loc{nullptr}, cls1{nullptr}, cls_out{nullptr};
  torch::nn::Conv2d seg8{nullptr}, seg16{nullptr}, seg32{nullptr}, seg_fuse{nullptr},
      seg_out{nullptr};
  // Taps kept between backbone() and heads() during a training forward.
  torch::Tensor tap8_, tap16_;
};
TORCH_MODULE(Detector);

// Row-anchor accuracy: fraction of (lane, anchor) entries whose argmax cell
// equals the target cell (the "no lane" cell included).
double anchor_accuracy(const torch::Tensor& loc_logits, const torch::Tensor& loc_targets);

}  // namespace s2r::detector
