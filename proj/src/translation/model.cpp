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

#include "s2r/translation/model.hpp"

#include "s2r/errors.hpp"

namespace s2r::translation {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

std::string to_string(Mode mode) { return mode == Mode::kUnit ? "unit" : "munit"; }

Mode mode_from_string(const std::string& name) {
  if (name == "unit") return Mode::kUnit;
  if (name == "munit") return Mode::kMunit;
  throw ConfigError("unknown translation mode '" + name + "'");
}

void TranslationConfig::validate() const {
  if (channels < 1 || base_width < 1 || num_down < 1 || num_res < 1 || style_dim < 1 ||
      mlp_dim < 1 || disc_scales < 1 || disc_base < 1 || disc_layers < 1) {
    throw ConfigError("translation network sizes must be positive");
  }
}

void to_json(nlohmann::json& j, const TranslationConfig& c) {
  j = {{"mode", to_string(c.mode)}, {"channels", c.channels},     {"base_width", c.base_width},
       {"num_down", c.num_down},    {"num_res", c.num_res},       {"style_dim", c.style_dim},
       {"mlp_dim", c.mlp_dim},      {"disc_scales", c.disc_scales}, {"disc_base", c.disc_base},
       {"disc_layers", c.disc_layers}, {"noise_seed", c.noise_seed}};
}

TranslationConfig translation_config_from_json(const nlohmann::json& j) {
  TranslationConfig c;
  if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
  c.channels = j.value("channels", c.channels);
  c.base_width = j.value("base_width", c.base_width);
  c.num_down = j.value("num_down", c.num_down);
  c.num_res = j.value("num_res", c.num_res);
  c.style_dim = j.value("style_dim", c.style_dim);
  c.mlp_dim = j.value("mlp_dim", c.mlp_dim);
  c.disc_scales = j.value("disc_scales", c.disc_scales);
  c.disc_base = j.value("disc_base", c.disc_base);
  c.disc_layers = j.value("disc_layers", c.disc_layers);
  c.noise_seed = j.value("noise_seed", c.noise_seed);
  c.validate();
  return c;
}

namespace {

nn::Conv2d conv(int in, int out, int k, int stride) {
  return nn::Conv2d(nn::Conv2dOptions(in, out, k).stride(stride).padding((k - 1) / 2));
}

torch::Tensor instance_normalize(const torch::Tensor& x, double eps = 1e-5) {
  auto mean = x.mean({2, 3}, true);
  auto var = (x - mean).pow(2).mean({2, 3}, true);
  return (x - mean) / torch::sqrt(var + eps);
}

}  // namespace

ConvNormActImpl::ConvNormActImpl(int in, int out, int k, int stride, Norm norm, bool relu)
    : relu_(relu) {
  conv = register_module("conv", translation::conv(in, out, k, stride));
  if (norm == Norm::kInstance) {
    inorm = register_module("inorm", nn::InstanceNorm2d(nn::InstanceNorm2dOptions(out)));
  } else if (norm == Norm::kLayer) {
    lnorm = register_module("lnorm", nn::GroupNorm(nn::GroupNormOptions(1, out)));
  }
}

torch::Tensor ConvNormActImpl::forward(const torch::Tensor& x) {
  auto y = conv(x);
  if (inorm) y = inorm(y);
  if (lnorm) y = lnorm(y);
  return relu_ ? torch::relu(y) : y;
}

ResBlockImpl::ResBlockImpl(int ch) {
  a = register_module("a", ConvNormAct(ch, ch, 3, 1, ConvNormActImpl::Norm::kInstance, true));
  b = register_module("b", ConvNormAct(ch, ch, 3, 1, ConvNormActImpl::Norm::kInstance, false));
}

torch::Tensor ResBlockImpl::forward(const torch::Tensor& x) { return x + b(a(x)); }

AdaResBlockImpl::AdaResBlockImpl(int ch) : ch_(ch) {
  c1 = register_module("c1", conv(ch, ch, 3, 1));
  c2 = register_module("c2", conv(ch, ch, 3, 1));
}

torch::Tensor AdaResBlockImpl::forward(const torch::Tensor& x, const torch::Tensor& p) {
  auto part = [&](int i) { return p.slice(1, i * ch_, (i + 1) * ch_).unsqueeze(-1).unsqueeze(-1); };
  auto y = torch::relu(instance_normalize(c1(x)) * part(0) + part(1));
  y = instance_normalize(c2(y)) * part(2) + part(3);
  return x + y;
}

EncoderImpl::EncoderImpl(const TranslationConfig& cfg) {
  using N = ConvNormActImpl::Norm;
  body = nn::Sequential();
  int w = cfg.base_width;
  body->push_back(ConvNormAct(cfg.channels, w, 7, 1, N::kInstance, true));
  for (int i = 0; i < cfg.num_down; ++i, w *= 2) {
    body->push_back(ConvNormAct(w, 2 * w, 4, 2, N::kInstance, true));
  }
  // UNIT's last block is shared and lives in the translator.
  const int own = cfg.mode == Mode::kUnit ? cfg.num_res - 1 : cfg.num_res;
  for (int i = 0; i < own; ++i) body->push_back(ResBlock(w));
  register_module("body", body);
}

torch::Tensor EncoderImpl::forward(const torch::Tensor& x) { return body->forward(x); }

StyleEncoderImpl::StyleEncoderImpl(const TranslationConfig& cfg) {
  using N = ConvNormActImpl::Norm;
  body = nn::Sequential();
  int w = cfg.base_width;
  body->push_back(ConvNormAct(cfg.channels, w, 7, 1, N::kNone, true));
  for (int i = 0; i < 4; ++i) {
    const int next = std::min(2 * w, cfg.latent_channels());
    body->push_back(ConvNormAct(w, next, 4, 2, N::kNone, true));
    w = next;
  }
  register_module("body", body);
  out = register_module("out", nn::Linear(w, cfg.style_dim));
}

torch::Tensor StyleEncoderImpl::forward(const torch::Tensor& x) {
  return out(body->forward(x).mean({2, 3}));
}

GeneratorImpl::GeneratorImpl(const TranslationConfig& cfg) : mode_(cfg.mode) {
  using N = ConvNormActImpl::Norm;
  int w = cfg.latent_channels();
  if (mode_ == Mode::kUnit) {
    res = nn::Sequential();
    for (int i = 0; i < cfg.num_res - 1; ++i) res->push_back(ResBlock(w));
    register_module("res", res);
  } else {
    ada = nn::ModuleList();
    int params = 0;
    for (int i = 0; i < cfg.num_res; ++i) {
      AdaResBlock block(w);
      params += block->num_params();
      ada->push_back(block);
    }
    register_module("ada", ada);
    mlp = register_module("mlp", nn::Sequential(nn::Linear(cfg.style_dim, cfg.mlp_dim),
                                                nn::Functional(torch::relu),
                                                nn::Linear(cfg.mlp_dim, cfg.mlp_dim),
                                                nn::Functional(torch::relu),
                                                nn::Linear(cfg.mlp_dim, params)));
  }
  up = nn::Sequential();
  const N norm = mode_ == Mode::kUnit ? N::kInstance : N::kLayer;
  for (int i = 0; i < cfg.num_down; ++i, w /= 2) {
    up->push_back(nn::Upsample(
        nn::UpsampleOptions().scale_factor(std::vector<double>{2.0, 2.0}).mode(torch::kNearest)));
    up->push_back(ConvNormAct(w, w / 2, 5, 1, norm, true));
  }
  up->push_back(conv(w, cfg.channels, 7, 1));
  up->push_back(nn::Functional(torch::tanh));
  register_module("up", up);
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor& z, const torch::Tensor& style) {
  torch::Tensor h = z;
  if (mode_ == Mode::kUnit) {
    if (!res->is_empty()) h = res->forward(h);
  } else {
    if (!style.defined()) throw UsageError("MUNIT decoding needs a style code");
    const auto params = mlp->forward(style);
    int offset = 0;
    for (const auto& m : *ada) {
      auto block = m->as<AdaResBlockImpl>();
      const int n = block->num_params();
      h = block->forward(h, params.slice(1, offset, offset + n));
      offset += n;
    }
  }
  return up->forward(h);
}

MultiScaleDiscriminatorImpl::MultiScaleDiscriminatorImpl(const TranslationConfig& cfg) {
  scales = nn::ModuleList();
  for (int s = 0; s < cfg.disc_scales; ++s) {
    nn::Sequential d;
    int w = cfg.disc_base;
    d->push_back(conv(cfg.channels, w, 4, 2));
    d->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
    for (int l = 1; l < cfg.disc_layers; ++l, w *= 2) {
      d->push_back(conv(w, 2 * w, 4, 2));
      d->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
    }
    d->push_back(nn::Conv2d(nn::Conv2dOptions(w, 1, 1)));
    scales->push_back(d);
  }
  register_module("scales", scales);
}

std::vector<torch::Tensor> MultiScaleDiscriminatorImpl::forward(const torch::Tensor& x) {
  std::vector<torch::Tensor> outs;
  torch::Tensor h = x;
  for (const auto& m : *scales) {
    outs.push_back(m->as<nn::SequentialImpl>()->forward(h));
    h = F::avg_pool2d(h, F::AvgPool2dFuncOptions(3).stride(2).padding(1).count_include_pad(false));
  }
  return outs;
}

TranslatorImpl::TranslatorImpl(TranslationConfig cfg)
    : cfg_(std::move(cfg)), noise_gen_(at::detail::createCPUGenerator(cfg_.noise_seed)) {
  cfg_.validate();
  e_sim = register_module("e_sim", Encoder(cfg_));
  e_real = register_module("e_real", Encoder(cfg_));
  g_sim = register_module("g_sim", Generator(cfg_));
  g_real = register_module("g_real", Generator(cfg_));
  if (cfg_.mode == Mode::kUnit) {
    shared_enc = register_module("shared_enc", ResBlock(cfg_.latent_channels()));
    shared_dec = register_module("shared_dec", ResBlock(cfg_.latent_channels()));
  } else {
    s_sim = register_module("s_sim", StyleEncoder(cfg_));
    s_real = register_module("s_real", StyleEncoder(cfg_));
  }
  d_sim = register_module("d_sim", MultiScaleDiscriminator(cfg_));
  d_real = register_module("d_real", MultiScaleDiscriminator(cfg_));
}

LatentCode TranslatorImpl::encode(const torch::Tensor& x, Domain d, bool training_flag) {
  if (x.dim() != 4 || x.size(1) != cfg_.channels || x.size(2) % cfg_.stride() != 0 ||
      x.size(3) % cfg_.stride() != 0) {
    throw ShapeError("translator input must be [B, C, H, W] with H, W divisible by the stride");
  }
  const bool sim = d == Domain::kSim;
  LatentCode code;
  code.content = (sim ? e_sim : e_real)->forward(x);
  if (cfg_.mode == Mode::kUnit) code.content = shared_enc(code.content);
  if (training_flag) {
    code.content = code.content + torch::randn(code.content.sizes(), noise_gen_,
                                               code.content.options().requires_grad(false));
  }
  if (cfg_.mode == Mode::kMunit) code.style = (sim ? s_sim : s_real)->forward(x);
  return code;
}

torch::Tensor TranslatorImpl::decode(const LatentCode& code, Domain d) {
  auto& g = d == Domain::kSim ? g_sim : g_real;
  if (cfg_.mode == Mode::kUnit) return g->forward(shared_dec(code.content));
  return g->forward(code.content, code.style);
}

torch::Tensor TranslatorImpl::sample_style(int64_t batch, torch::Generator& gen) {
  return torch::randn({batch, cfg_.style_dim}, gen, torch::kFloat32);
}

torch::Tensor TranslatorImpl::translate(const torch::Tensor& x, Domain src, Domain tgt,
                                        std::uint64_t style_seed) {
  if (src == tgt) throw UsageError("translate needs two different domains; use reconstruction");
  LatentCode code = encode(x, src, false);
  if (cfg_.mode == Mode::kMunit) {
    auto gen = at::detail::createCPUGenerator(style_seed);
    code.style = sample_style(x.size(0), gen).to(x.dtype());
  }
  return decode(code, tgt);
}

std::vector<torch::Tensor> TranslatorImpl::codec_parameters() {
  std::vector<torch::Tensor> out;
  for (const auto& p : named_parameters(true)) {
    if (p.key().rfind("d_sim.", 0) == 0 || p.key().rfind("d_real.", 0) == 0) continue;
    out.push_back(p.value());
  }
  return out;
}

std::vector<torch::Tensor> TranslatorImpl::discriminator_parameters() {
  auto out = d_sim->parameters();
  for (const auto& p : d_real->parameters()) out.push_back(p);
  return out;
}

}  // namespace s2r::translation
