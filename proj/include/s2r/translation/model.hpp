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

#include "s2r/data/dataset.hpp"

namespace s2r::translation {

using data::Domain;

enum class Mode { kUnit, kMunit };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct TranslationConfig {
  Mode mode = Mode::kUnit;
  int channels = 3;
  int base_width = 16;   // first conv width; the latent has 4x this
  int num_down = 2;      // stride-2 convolutions (latent stride 2^num_down)
  int num_res = 2;       // residual blocks in encoder and in generator
  int style_dim = 8;     // MUNIT only
  int mlp_dim = 64;      // MUNIT AdaIN parameter MLP width
  int disc_scales = 3;
  int disc_base = 16;
  int disc_layers = 3;   // stride-2 convolutions per discriminator scale
  std::uint64_t noise_seed = 0;

  int latent_channels() const { return base_width << num_down; }
  int stride() const { return 1 << num_down; }
  void validate() const;
};

void to_json(nlohmann::json& j, const TranslationConfig& c);
TranslationConfig translation_config_from_json(const nlohmann::json& j);

struct LatentCode {
  torch::Tensor content;  // [B, latent_channels, H/stride, W/stride]
  torch::Tensor style;    // [B, style_dim] in MUNIT mode, otherwise undefined
};

// What the reconstruction losses need from a translator. Tests plug in
// identity or constant stubs.
class DomainCodec {
 public:
  virtual ~DomainCodec() = default;
  virtual Mode codec_mode() const = 0;
  virtual LatentCode encode(const torch::Tensor& x, Domain d, bool training_flag) = 0;
  virtual torch::Tensor decode(const LatentCode& code, Domain d) = 0;
  // Unit-Gaussian style codes for cross-domain decoding (MUNIT).
  virtual torch::Tensor sample_style(int64_t batch, torch::Generator& gen) = 0;
};

class ConvNormActImpl : public torch::nn::Module {
 public:
  enum class Norm { kNone, kInstance, kLayer };
  ConvNormActImpl(int in, int out, int k, int stride, Norm norm, bool relu);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d conv{nullptr};
  torch::nn::InstanceNorm2d inorm{nullptr};
  torch::nn::GroupNorm lnorm{nullptr};
  bool relu_;
};
TORCH_MODULE(ConvNormAct);

class ResBlockImpl : public torch::nn::Module {
 public:
  explicit ResBlockImpl(int ch);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  ConvNormAct a{nullptr}, b{nullptr};
};
TORCH_MODULE(ResBlock);

// Residual block whose instance norms take scale/shift from a style MLP.
class AdaResBlockImpl : public torch::nn::Module {
 public:
  explicit AdaResBlockImpl(int ch);
  // params: [B, 4*ch] = (scale1, shift1, scale2, shift2)
  torch::Tensor forward(const torch::Tensor& x, const torch::Tensor& params);
  int num_params() const { return 4 * ch_; }

 private:
  int ch_;
  torch::nn::Conv2d c1{nullptr}, c2{nullptr};
};
TORCH_MODULE(AdaResBlock);

class EncoderImpl : public torch::nn::Module {
 public:
  explicit EncoderImpl(const TranslationConfig& cfg);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Sequential body{nullptr};
};
TORCH_MODULE(Encoder);

class StyleEncoderImpl : public torch::nn::Module {
 public:
  explicit StyleEncoderImpl(const TranslationConfig& cfg);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Sequential body{nullptr};
  torch::nn::Linear out{nullptr};
};
TORCH_MODULE(StyleEncoder);

class GeneratorImpl : public torch::nn::Module {
 public:
  explicit GeneratorImpl(const TranslationConfig& cfg);
  torch::Tensor forward(const torch::Tensor& z, const torch::Tensor& style = {});

 private:
  Mode mode_;
  torch::nn::Sequential res{nullptr};
  torch::nn::ModuleList ada{nullptr};
  torch::nn::Sequential mlp{nullptr};
  torch::nn::Sequential up{nullptr};
};
TORCH_MODULE(Generator);

// Multi-scale PatchGAN; each scale sees the input average-pooled once more.
class MultiScaleDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit MultiScaleDiscriminatorImpl(const TranslationConfig& cfg);
  std::vector<torch::Tensor> forward(const torch::Tensor& x);

 private:
  torch::nn::ModuleList scales{nullptr};
};
TORCH_MODULE(MultiScaleDiscriminator);

// Encoder/generator pairs for both domains plus the two image
// discriminators. UNIT shares the innermost residual block of the encoders
// and of the generators between domains (shared latent space).
class TranslatorImpl : public torch::nn::Module, public DomainCodec {
 public:
  explicit TranslatorImpl(TranslationConfig cfg);

  Mode codec_mode() const override { return cfg_.mode; }
  // Adds unit Gaussian noise to the content code when training_flag is set.
  LatentCode encode(const torch::Tensor& x, Domain d, bool training_flag) override;
  torch::Tensor decode(const LatentCode& code, Domain d) override;
  torch::Tensor sample_style(int64_t batch, torch::Generator& gen) override;

  // Source content decoded in the target domain; MUNIT draws the style from
  // a unit Gaussian seeded by `style_seed`.
  torch::Tensor translate(const torch::Tensor& x, Domain src, Domain tgt,
                          std::uint64_t style_seed = 0);

  MultiScaleDiscriminator& discriminator(Domain d) { return d == Domain::kSim ? d_sim : d_real; }
  // Encoder, generator and shared parameters (not the discriminators).
  std::vector<torch::Tensor> codec_parameters();
  std::vector<torch::Tensor> discriminator_parameters();

  const TranslationConfig& config() const noexcept { return cfg_; }
  torch::Generator& noise_generator() { return noise_gen_; }

 private:
  TranslationConfig cfg_;
  Encoder e_sim{nullptr}, e_real{nullptr};
  StyleEncoder s_sim{nullptr}, s_real{nullptr};
  Generator g_sim{nullptr}, g_real{nullptr};
  ResBlock shared_enc{nullptr}, shared_dec{nullptr};
  MultiScaleDiscriminator d_sim{nullptr}, d_real{nullptr};
  torch::Generator noise_gen_;
};
TORCH_MODULE(Translator);

}  // namespace s2r::translation
