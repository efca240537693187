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

#include "s2r/translation/losses.hpp"

#include <cmath>

#include "s2r/detector/checkpoint.hpp"
#include "s2r/errors.hpp"

namespace s2r::translation {

namespace nn = torch::nn;

LsganLosses lsgan_losses(const torch::Tensor& d_data, const torch::Tensor& d_generated) {
  return {(d_data - 1).pow(2).mean() + d_generated.pow(2).mean(),
          (d_generated - 1).pow(2).mean()};
}

LsganLosses lsgan_losses(const std::vector<torch::Tensor>& d_data,
                         const std::vector<torch::Tensor>& d_generated) {
  if (d_data.size() != d_generated.size() || d_data.empty()) {
    throw ShapeError("discriminator output lists differ in length");
  }
  LsganLosses total = lsgan_losses(d_data[0], d_generated[0]);
  for (std::size_t s = 1; s < d_data.size(); ++s) {
    const auto l = lsgan_losses(d_data[s], d_generated[s]);
    total.d = total.d + l.d;
    total.g = total.g + l.g;
  }
  return total;
}

torch::Tensor instance_norm(const torch::Tensor& f, double eps) {
  if (f.dim() != 4) throw ShapeError("instance_norm expects [B, C, H, W]");
  auto mean = f.mean({2, 3}, true);
  auto var = (f - mean).pow(2).mean({2, 3}, true);
  return (f - mean) / torch::sqrt(var + eps);
}

PerceptualNetImpl::PerceptualNetImpl(int width_divisor, int in_channels) {
  if (width_divisor < 1) throw ConfigError("perceptual width divisor must be >= 1");
  const int layout[] = {64, 64, 0, 128, 128, 0, 256, 256, 256, 0, 512, 512, 512, 0, 512, 512, 512};
  features = nn::Sequential();
  int in = in_channels;
  for (int w : layout) {
    if (w == 0) {
      features->push_back(nn::MaxPool2d(nn::MaxPool2dOptions(2).stride(2)));
      continue;
    }
    const int out = std::max(1, w / width_divisor);
    features->push_back(nn::Conv2d(nn::Conv2dOptions(in, out, 3).padding(1)));
    features->push_back(nn::Functional(torch::relu));
    in = out;
  }
  register_module("features", features);
  for (auto& p : parameters()) p.set_requires_grad(false);
}

torch::Tensor PerceptualNetImpl::forward(const torch::Tensor& x) { return features->forward(x); }

PerceptualNet make_perceptual_net(const PerceptualConfig& cfg) {
  PerceptualNet net(cfg.width_divisor);
  {
    // He-normal weights from a private generator; the global RNG is untouched.
    torch::NoGradGuard guard;
    auto gen = at::detail::createCPUGenerator(cfg.seed);
    for (auto& p : net->named_parameters(true)) {
      auto& t = p.value();
      if (t.dim() == 4) {
        const double fan_in = static_cast<double>(t.size(1) * t.size(2) * t.size(3));
        t.copy_(torch::randn(t.sizes(), gen, t.options()) * std::sqrt(2.0 / fan_in));
      } else {
        t.zero_();
      }
    }
  }
  if (!cfg.weights.empty()) {
    if (!std::filesystem::exists(cfg.weights)) {
      throw ConfigError("perceptual network weights not found: " + cfg.weights.string());
    }
    try {
      detector::restore_state(*net, "", detector::load_checkpoint(cfg.weights).tensors);
    } catch (const LoadError& e) {
      throw ConfigError(std::string("unusable perceptual network weights: ") + e.what());
    }
  }
  net->eval();
  return net;
}

torch::Tensor perceptual_distance(const torch::Tensor& fa, const torch::Tensor& fb) {
  return (instance_norm(fa) - instance_norm(fb)).pow(2).mean();
}

torch::Tensor perceptual_loss(const torch::Tensor& a, const torch::Tensor& b, PerceptualNet& net) {
  return perceptual_distance(net->forward(a), net->forward(b));
}

GenerativePass generative_pass(DomainCodec& codec, const torch::Tensor& x_sim,
                               const torch::Tensor& x_real, bool training_flag,
                               torch::Generator& style_gen) {
  GenerativePass p;
  p.c_sim = codec.encode(x_sim, Domain::kSim, training_flag);
  p.c_real = codec.encode(x_real, Domain::kReal, training_flag);
  p.x_ss = codec.decode(p.c_sim, Domain::kSim);
  p.x_rr = codec.decode(p.c_real, Domain::kReal);

  LatentCode to_real{p.c_sim.content, {}}, to_sim{p.c_real.content, {}};
  if (codec.codec_mode() == Mode::kMunit) {
    p.style_r = codec.sample_style(x_sim.size(0), style_gen).to(x_sim.dtype());
    p.style_s = codec.sample_style(x_real.size(0), style_gen).to(x_real.dtype());
    to_real.style = p.style_r;
    to_sim.style = p.style_s;
  }
  p.x_sr = codec.decode(to_real, Domain::kReal);
  p.x_rs = codec.decode(to_sim, Domain::kSim);
  p.c_sr = codec.encode(p.x_sr, Domain::kReal, training_flag);
  p.c_rs = codec.encode(p.x_rs, Domain::kSim, training_flag);

  // Back-translation keeps each image's own style in MUNIT.
  LatentCode back_sim{p.c_sr.content, p.c_sim.style}, back_real{p.c_rs.content, p.c_real.style};
  p.x_srs = codec.decode(back_sim, Domain::kSim);
  p.x_rsr = codec.decode(back_real, Domain::kReal);
  return p;
}

ReconstructionLosses reconstruction_losses(const GenerativePass& p, const torch::Tensor& x_sim,
                                           const torch::Tensor& x_real, Mode mode) {
  auto l1 = [](const torch::Tensor& a, const torch::Tensor& b) { return (a - b).abs().mean(); };
  ReconstructionLosses l;
  l.recon = l1(x_sim, p.x_ss) + l1(x_real, p.x_rr);
  l.cyc_recon = l1(x_sim, p.x_srs) + l1(x_real, p.x_rsr);
  if (mode == Mode::kMunit) {
    l.recon_c = l1(p.c_sr.content, p.c_sim.content) + l1(p.c_rs.content, p.c_real.content);
    l.recon_s = l1(p.c_sr.style, p.style_r) + l1(p.c_rs.style, p.style_s);
  }
  return l;
}

ReconstructionLosses reconstruction_losses(DomainCodec& codec, const torch::Tensor& x_sim,
                                           const torch::Tensor& x_real, bool training_flag,
                                           std::uint64_t seed) {
  auto gen = at::detail::createCPUGenerator(seed);
  const auto pass = generative_pass(codec, x_sim, x_real, training_flag, gen);
  return reconstruction_losses(pass, x_sim, x_real, codec.codec_mode());
}

}  // namespace s2r::translation
