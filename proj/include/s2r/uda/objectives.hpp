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
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "s2r/errors.hpp"
#include "s2r/translation/model.hpp"

namespace s2r::uda {

// Encoder-generator loss weights. l0..l6 follow the usual ordering:
// recon, cyclic recon, LSGAN(G), task, cyclic task, perceptual, feature
// adversarial; lc/ls are the MUNIT content and style code terms.
struct GenLossWeights {
  double l0 = 10.0, l1 = 10.0, l2 = 1.0, l3 = 1.0, l4 = 1.0, l5 = 1.0, l6 = 0.1;
  double lc = 1.0, ls = 1.0;
  void validate() const;
};

void to_json(nlohmann::json& j, const GenLossWeights& w);
GenLossWeights gen_loss_weights_from_json(const nlohmann::json& j);

// Objectives exactly as written for the feature discriminator (sim labelled
// 1, real 0). Both are maximised by their owner; optimisers minimise the
// negations returned by d_min()/g_min().
struct AdvFeaLosses {
  torch::Tensor d;  // E[log(1 - D(real))] + E[log D(sim)]
  torch::Tensor g;  // E[log D(real)] + E[log(1 - D(sim))]
  int64_t clamped = 0;

  torch::Tensor d_min() const { return -d; }
  torch::Tensor g_min() const { return -g; }
};

inline constexpr double kScoreEps = 1e-7;

AdvFeaLosses adv_fea_losses(const torch::Tensor& scores_real, const torch::Tensor& scores_sim,
                            double eps = kScoreEps);

// Loss terms of one encoder-generator update. adv_fea_g is the minimised
// form (g_min()).
template <typename T>
struct GenComponents {
  std::optional<T> recon, cyc_recon, lsgan_g, task, cyc_task, vgg;
  std::optional<T> recon_c, recon_s;
  std::optional<T> adv_fea_g;
};

// A component may be left out only when its weight is zero.
template <typename T>
T total_generative_loss(const GenComponents<T>& c, const GenLossWeights& w,
                        translation::Mode mode, bool with_feature_disc) {
  std::vector<std::pair<double, const T*>> terms;
  auto add = [&](const std::optional<T>& v, double weight, const char* name) {
    if (v) {
      terms.emplace_back(weight, &*v);
    } else if (weight != 0.0) {
      throw ConfigError(std::string("generative loss component missing: ") + name);
    }
  };
  add(c.recon, w.l0, "recon");
  add(c.cyc_recon, w.l1, "cyc_recon");
  add(c.lsgan_g, w.l2, "lsgan_g");
  add(c.task, w.l3, "task");
  add(c.cyc_task, w.l4, "cyc_task");
  add(c.vgg, w.l5, "vgg");
  if (mode == translation::Mode::kMunit) {
    add(c.recon_c, w.lc, "recon_c");
    add(c.recon_s, w.ls, "recon_s");
  }
  if (with_feature_disc) add(c.adv_fea_g, w.l6, "adv_fea_g");

  if (terms.empty()) {
    if constexpr (std::is_arithmetic_v<T>) {
      return T(0);
    } else {
      return torch::zeros({});
    }
  }
  T total = *terms[0].second * terms[0].first;
  for (std::size_t i = 1; i < terms.size(); ++i) total = total + *terms[i].second * terms[i].first;
  return total;
}

// Linear warmup 0 -> peak over warmup_steps, then cosine decay to 0 at
// total_steps.
struct LrSchedule {
  double peak = 4e-4;
  int64_t warmup_steps = 0;
  int64_t total_steps = 1;
  void validate() const;
};

double lr_at(int64_t step, const LrSchedule& schedule);

}  // namespace s2r::uda
