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

#include "s2r/uda/objectives.hpp"

#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

namespace s2r::uda {

void GenLossWeights::validate() const {
  for (double v : {l0, l1, l2, l3, l4, l5, l6, lc, ls}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("generative loss weights must be finite and nonnegative");
    }
  }
}

void to_json(nlohmann::json& j, const GenLossWeights& w) {
  j = {{"l0", w.l0}, {"l1", w.l1}, {"l2", w.l2}, {"l3", w.l3}, {"l4", w.l4},
       {"l5", w.l5}, {"l6", w.l6}, {"lc", w.lc}, {"ls", w.ls}};
}

GenLossWeights gen_loss_weights_from_json(const nlohmann::json& j) {
  GenLossWeights w;
  w.l0 = j.value("l0", w.l0);
  w.l1 = j.value("l1", w.l1);
  w.l2 = j.value("l2", w.l2);
  w.l3 = j.value("l3", w.l3);
  w.l4 = j.value("l4", w.l4);
  w.l5 = j.value("l5", w.l5);
  w.l6 = j.value("l6", w.l6);
  w.lc = j.value("lc", w.lc);
  w.ls = j.value("ls", w.ls);
  w.validate();
  return w;
}

AdvFeaLosses adv_fea_losses(const torch::Tensor& scores_real, const torch::Tensor& scores_sim,
                            double eps) {
  if (!scores_real.defined() || !scores_sim.defined() || scores_real.numel() == 0 ||
      scores_sim.numel() == 0) {
    throw ShapeError("feature discriminator scores are empty");
  }
  AdvFeaLosses out;
  {
    torch::NoGradGuard g;
    out.clamped = ((scores_real < eps) | (scores_real > 1 - eps)).sum().item<int64_t>() +
                  ((scores_sim < eps) | (scores_sim > 1 - eps)).sum().item<int64_t>();
  }
  if (out.clamped > 0) spdlog::debug("clamped {} saturated discriminator scores", out.clamped);
  const auto r = scores_real.clamp(eps, 1 - eps);
  const auto s = scores_sim.clamp(eps, 1 - eps);
  out.d = torch::log(1 - r).mean() + torch::log(s).mean();
  out.g = torch::log(r).mean() + torch::log(1 - s).mean();
  return out;
}

void LrSchedule::validate() const {
  if (!(peak > 0.0)) throw ConfigError("peak learning rate must be positive");
  if (total_steps < 1) throw ConfigError("schedule horizon must be at least one step");
  if (warmup_steps < 0 || warmup_steps >= total_steps) {
    throw ConfigError("warmup must be shorter than the schedule horizon");
  }
}

double lr_at(int64_t step, const LrSchedule& s) {
  s.validate();
  if (step < 0 || step > s.total_steps) {
    throw ValidationError("step " + std::to_string(step) + " outside schedule [0, " +
                          std::to_string(s.total_steps) + "]");
  }
  if (step < s.warmup_steps) {
    return s.peak * static_cast<double>(step) / static_cast<double>(s.warmup_steps);
  }
  const double progress = static_cast<double>(step - s.warmup_steps) /
                          static_cast<double>(s.total_steps - s.warmup_steps);
  return 0.5 * s.peak * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace s2r::uda
