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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <torch/torch.h>

#include "s2r/data/batching.hpp"
#include "s2r/detector/checkpoint.hpp"
#include "s2r/detector/evaluate.hpp"
#include "s2r/detector/model.hpp"
#include "s2r/translation/losses.hpp"
#include "s2r/translation/model.hpp"
#include "s2r/uda/config.hpp"

namespace s2r::uda {

// Small convolutional domain classifier over encoder features. Output is the
// probability that the features came from the sim domain.
class FeatureDiscriminatorImpl : public torch::nn::Module {
 public:
  FeatureDiscriminatorImpl(int in_channels, int width = 64);
  torch::Tensor forward(const torch::Tensor& features);  // [B] in (0, 1)

 private:
  torch::nn::Conv2d c1{nullptr}, c2{nullptr};
  torch::nn::Linear out{nullptr};
};
TORCH_MODULE(FeatureDiscriminator);

// kTranslation is stage 1 of the two-stage strategies: translator only.
enum class Loop { kSupervised, kAda, kGenerative, kTranslation };

std::string to_string(Loop loop);
// Stage 0 is the only stage except for two-stage strategies (stage 0 =
// translation, stage 1 = detector on translated frames).
Loop loop_for(Strategy s, int stage = 0);

struct TensorBatch {
  torch::Tensor x_sim;            // labelled frames, [B, 3, H, W] in [-1, 1]
  detector::TargetBatch y_sim;    // undefined tensors when targets were not requested
  torch::Tensor x_real;           // unlabelled frames; undefined in supervised loops
};

// Augments (seeded per frame), resizes to the model input and builds targets.
TensorBatch make_batch(const data::UnpairedBatch& batch, const StrategyConfig& cfg,
                       const lane::LaneClassMapping* mapping, bool with_targets, bool with_real,
                       std::uint64_t augment_seed);

// Deterministic seed derivation for sub-streams (augmentation, styles, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

using StepLosses = std::map<std::string, double>;

class Trainer {
 public:
  Trainer(const StrategyConfig& cfg, Loop loop, std::uint64_t seed);

  Loop loop() const noexcept { return loop_; }
  // Detector config the network was built with (latent input in the joint
  // generative loop).
  const detector::DetectorConfig& detector_config() const noexcept { return det_cfg_; }

  // Schedules every optimiser for global step `step` of `total_steps`;
  // each group peaks at its own initial rate.
  void schedule(int64_t step, int64_t total_steps, int64_t warmup_steps);
  void set_learning_rates(double detector, double discriminator, double generator);
  double detector_lr() const noexcept { return lr_det_; }
  double generator_lr() const noexcept { return lr_gen_; }

  // One discriminator update (if the loop has one) then one update of the
  // detector and/or encoder-generators.
  StepLosses step(const TensorBatch& batch);
  // Discriminator update alone.
  StepLosses discriminator_step(const TensorBatch& batch);

  // Detector output for frames of domain `d` (inference mode).
  detector::DetectorOutput infer(const torch::Tensor& x, data::Domain d);
  detector::ForwardFn forward_fn(data::Domain d = data::Domain::kReal);
  // Features seen by the feature discriminator (inference mode).
  torch::Tensor features(const torch::Tensor& x, data::Domain d);
  torch::Tensor fea_scores(const torch::Tensor& features);

  detector::Checkpoint checkpoint() const;
  void restore(const detector::Checkpoint& ckpt);

  detector::Detector& detector() { return det_; }
  translation::Translator& translator() { return translator_; }
  FeatureDiscriminator& fea_disc() { return fea_disc_; }

 private:
  struct DiscInputs {
    torch::Tensor x_sim, x_real, x_sr, x_rs;  // image discriminators
    torch::Tensor f_sim, f_real;              // feature discriminator
  };
  StepLosses update_discriminators(const DiscInputs& in);
  StepLosses supervised_step(const TensorBatch& b);
  StepLosses ada_step(const TensorBatch& b, bool disc_only);
  StepLosses generative_step(const TensorBatch& b, bool disc_only);
  void set_training(bool on);

  StrategyConfig cfg_;
  Loop loop_;
  std::uint64_t seed_;
  detector::DetectorConfig det_cfg_;
  detector::Detector det_{nullptr};
  translation::Translator translator_{nullptr};
  FeatureDiscriminator fea_disc_{nullptr};
  std::optional<translation::PerceptualNet> perceptual_;
  std::unique_ptr<torch::optim::Adam> det_opt_, gen_opt_, disc_opt_;
  torch::Generator style_gen_;
  double lr_det_, lr_disc_, lr_gen_;
};

}  // namespace s2r::uda
