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

#include "s2r/detector/model.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "s2r/errors.hpp"

namespace s2r::detector {

namespace nn = torch::nn;

lane::ImageSize DetectorConfig::feature_input() const {
  const auto in = anchors.input_size();
  return {in.height / input_stride, in.width / input_stride};
}

void DetectorConfig::validate() const {
  const auto in = anchors.input_size();
  if (in.height % 32 != 0 || in.width % 32 != 0) {
    throw ConfigError(fmt::format("detector input {}x{} must be a multiple of 32", in.height,
                                  in.width));
  }
  if (input_stride != 1 && input_stride != 4) throw ConfigError("input_stride must be 1 or 4");
  if (in_channels < 1 || base_width < 1 || pool_channels < 1 || fc_hidden < 1 ||
      cls_hidden < 1 || num_classes < 2) {
    throw ConfigError("detector widths must be positive");
  }
}

void to_json(nlohmann::json& j, const DetectorConfig& c) {
  j = {{"anchors", c.anchors},          {"in_channels", c.in_channels},
       {"input_stride", c.input_stride}, {"base_width", c.base_width},
       {"pool_channels", c.pool_channels}, {"fc_hidden", c.fc_hidden},
       {"cls_hidden", c.cls_hidden},      {"num_classes", c.num_classes},
       {"aux_seg", c.aux_seg}};
}

DetectorConfig detector_config_from_json(const nlohmann::json& j) {
  DetectorConfig c;
  if (j.contains("anchors")) c.anchors = lane::row_anchor_config_from_json(j.at("anchors"));
  c.in_channels = j.value("in_channels", c.in_channels);
  c.input_stride = j.value("input_stride", c.input_stride);
  c.base_width = j.value("base_width", c.base_width);
  c.pool_channels = j.value("pool_channels", c.pool_channels);
  c.fc_hidden = j.value("fc_hidden", c.fc_hidden);
  c.cls_hidden = j.value("cls_hidden", c.cls_hidden);
  c.num_classes = j.value("num_classes", c.num_classes);
  c.aux_seg = j.value("aux_seg", c.aux_seg);
  c.validate();
  return c;
}

namespace {

nn::Conv2d conv(int in, int out, int k, int stride = 1, bool bias = false) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, k).stride(stride).padding(k / 2).bias(bias));
}

nn::GroupNorm gn(int ch) { return nn::GroupNorm(nn::GroupNormOptions(std::min(8, ch), ch)); }

}  // namespace

ResidualBlockImpl::ResidualBlockImpl(int in, int out, int stride) {
  conv1 = register_module("conv1", conv(in, out, 3, stride));
  norm1 = register_module("norm1", gn(out));
  conv2 = register_module("conv2", conv(out, out, 3));
  norm2 = register_module("norm2", gn(out));
  if (stride != 1 || in != out) {
    skip = register_module("skip", conv(in, out, 1, stride));
    skip_norm = register_module("skip_norm", gn(out));
  }
}

torch::Tensor ResidualBlockImpl::forward(const torch::Tensor& x) {
  auto y = torch::relu(norm1(conv1(x)));
  y = norm2(conv2(y));
  auto s = skip ? skip_norm(skip(x)) : x;
  return torch::relu(y + s);
}

DetectorImpl::DetectorImpl(DetectorConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const int b = cfg_.base_width;
  // Image input: stem /2, stage1 /2. Latent input (already /4): both stride 1.
  const int early = cfg_.input_stride == 1 ? 2 : 1;
  stem = register_module("stem", nn::Sequential(conv(cfg_.in_channels, b, 3, early), gn(b),
                                                nn::Functional(torch::relu)));
  stage1 = register_module("stage1", nn::Sequential(ResidualBlock(b, b, early),
                                                    ResidualBlock(b, b, 1)));
  stage2 = register_module("stage2", nn::Sequential(ResidualBlock(b, 2 * b, 2),
                                                    ResidualBlock(2 * b, 2 * b, 1)));
  stage3 = register_module("stage3", nn::Sequential(ResidualBlock(2 * b, 4 * b, 2),
                                                    ResidualBlock(4 * b, 4 * b, 1)));
  stage4 = register_module("stage4", nn::Sequential(ResidualBlock(4 * b, 8 * b, 2),
                                                    ResidualBlock(8 * b, 8 * b, 1)));

  const auto in = cfg_.anchors.input_size();
  const int flat = cfg_.pool_channels * (in.height / 32) * (in.width / 32);
  const auto& a = cfg_.anchors;
  pool = register_module("pool", conv(8 * b, cfg_.pool_channels, 1, 1, true));
  fc1 = register_module("fc1", nn::Linear(flat, cfg_.fc_hidden));
  fc_loc = register_module("fc_loc", nn::Linear(cfg_.fc_hidden, a.volume_size()));
  cls1 = register_module("cls1", nn::Linear(flat, cfg_.cls_hidden));
  cls_out = register_module("cls_out",
                            nn::Linear(cfg_.cls_hidden, a.num_lanes() * cfg_.num_classes));
  if (cfg_.aux_seg) {
    const int s = 2 * b;
    seg8 = register_module("seg8", conv(2 * b, s, 3, 1, true));
    seg16 = register_module("seg16", conv(4 * b, s, 3, 1, true));
    seg32 = register_module("seg32", conv(8 * b, s, 3, 1, true));
    seg_fuse = register_module("seg_fuse", conv(3 * s, s, 3, 1, true));
    seg_out = register_module("seg_out", conv(s, a.num_lanes() + 1, 1, 1, true));
  }
}

torch::Tensor DetectorImpl::backbone(const torch::Tensor& x) {
  const auto in = cfg_.feature_input();
  if (x.dim() != 4 || x.size(1) != cfg_.in_channels || x.size(2) != in.height ||
      x.size(3) != in.width) {
    throw ShapeError(fmt::format("detector expects [B, {}, {}, {}], got {}", cfg_.in_channels,
                                 in.height, in.width, fmt::join(x.sizes(), "x")));
  }
  auto y = stage2->forward(stage1->forward(stem->forward(x)));
  tap8_ = y;
  y = stage3->forward(y);
  tap16_ = y;
  return stage4->forward(y);
}

DetectorOutput DetectorImpl::heads(const torch::Tensor& features) {
  const auto& a = cfg_.anchors;
  const auto batch = features.size(0);
  auto flat = pool(features).flatten(1);
  DetectorOutput out;
  out.features = features;
  out.loc = fc_loc(torch::relu(fc1(flat)))
                .view({batch, a.num_lanes(), a.num_anchors(), a.num_cells() + 1});
  out.cls = cls_out(torch::relu(cls1(flat))).view({batch, a.num_lanes(), cfg_.num_classes});
  if (cfg_.aux_seg && is_training() && tap8_.defined() && tap8_.size(0) == batch) {
    const auto size = std::vector<int64_t>{tap8_.size(2), tap8_.size(3)};
    namespace F = torch::nn::functional;
    auto up = [&](const torch::Tensor& t) {
      return F::interpolate(t, F::InterpolateFuncOptions().size(size).mode(torch::kBilinear)
                                   .align_corners(false));
    };
    auto fused = torch::cat({torch::relu(seg8(tap8_)), up(torch::relu(seg16(tap16_))),
                             up(torch::relu(seg32(features)))},
                            1);
    out.seg = seg_out(torch::relu(seg_fuse(fused)));
  }
  tap8_ = torch::Tensor();
  tap16_ = torch::Tensor();
  return out;
}

DetectorOutput DetectorImpl::forward(const torch::Tensor& x) { return heads(backbone(x)); }

double anchor_accuracy(const torch::Tensor& loc_logits, const torch::Tensor& loc_targets) {
  torch::NoGradGuard guard;
  const auto pred = loc_logits.argmax(-1);
  return pred.eq(loc_targets).to(torch::kFloat64).mean().item<double>();
}

}  // namespace s2r::detector
