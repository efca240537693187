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

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include <torch/torch.h>

#include "s2r/translation/model.hpp"

namespace s2r::translation {

struct LsganLosses {
  torch::Tensor d;  // E[(D(x) - 1)^2] + E[D(g)^2]
  torch::Tensor g;  // E[(D(g) - 1)^2]
};

LsganLosses lsgan_losses(const torch::Tensor& d_data, const torch::Tensor& d_generated);
// Multi-scale discriminators: the per-scale losses are summed.
LsganLosses lsgan_losses(const std::vector<torch::Tensor>& d_data,
                         const std::vector<torch::Tensor>& d_generated);

// Per-sample, per-channel normalisation with biased variance.
torch::Tensor instance_norm(const torch::Tensor& features, double eps = 1e-5);

// VGG16-style convolution stack (13 convolutions in 5 blocks, widths
// divided by `width_divisor`) returning the last convolution's ReLU output,
// before the final pooling. Parameters are frozen.
class PerceptualNetImpl : public torch::nn::Module {
 public:
  explicit PerceptualNetImpl(int width_divisor = 8, int in_channels = 3);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Sequential features{nullptr};
};
TORCH_MODULE(PerceptualNet);

struct PerceptualConfig {
  // Empty: fixed random initialisation from `seed`. Otherwise a checkpoint
  // file whose tensors are named like the network's parameters.
  std::filesystem::path weights;
  int width_divisor = 8;
  std::uint64_t seed = 1234;
};

// Throws ConfigError when a weights file is named but missing or unusable.
PerceptualNet make_perceptual_net(const PerceptualConfig& cfg);

// MSE between instance-normalised features.
torch::Tensor perceptual_distance(const torch::Tensor& fa, const torch::Tensor& fb);
torch::Tensor perceptual_loss(const torch::Tensor& a, const torch::Tensor& b, PerceptualNet& net);

// Every intermediate of one reconstruction/translation pass over a pair of
// batches. Naming: x_sr is sim content decoded as real, x_srs that image
// encoded and decoded back to sim.
struct GenerativePass {
  LatentCode c_sim, c_real;
  torch::Tensor x_ss, x_rr;  // within-domain reconstructions
  torch::Tensor x_sr, x_rs;  // translations
  LatentCode c_sr, c_rs;     // translations re-encoded in their new domain
  torch::Tensor x_srs, x_rsr;
  torch::Tensor style_r, style_s;  // sampled styles used for translation (MUNIT)
};

GenerativePass generative_pass(DomainCodec& codec, const torch::Tensor& x_sim,
                               const torch::Tensor& x_real, bool training_flag,
                               torch::Generator& style_gen);

struct ReconstructionLosses {
  torch::Tensor recon;      // sum over domains of mean |x - G(E(x))|
  torch::Tensor cyc_recon;  // sum over domains of mean |x - back-translated x|
  torch::Tensor recon_c;    // MUNIT content-code L1, undefined for UNIT
  torch::Tensor recon_s;    // MUNIT style-code L1, undefined for UNIT
};

ReconstructionLosses reconstruction_losses(const GenerativePass& pass, const torch::Tensor& x_sim,
                                           const torch::Tensor& x_real, Mode mode);
ReconstructionLosses reconstruction_losses(DomainCodec& codec, const torch::Tensor& x_sim,
                                           const torch::Tensor& x_real,
                                           bool training_flag = false, std::uint64_t seed = 0);

}  // namespace s2r::translation
