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

#include "s2r/detector/losses.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "s2r/errors.hpp"

namespace s2r::detector {

namespace {

void check_loc(const torch::Tensor& p, const torch::Tensor& t) {
  if (p.dim() != 4 || t.dim() != 3 || p.size(0) != t.size(0) || p.size(1) != t.size(1) ||
      p.size(2) != t.size(2)) {
    throw ShapeError(fmt::format("location volume {} does not match targets {}",
                                 fmt::join(p.sizes(), "x"), fmt::join(t.sizes(), "x")));
  }
  if (t.numel() > 0) {
    const auto lo = t.min().item<int64_t>(), hi = t.max().item<int64_t>();
    if (lo < 0 || hi >= p.size(3)) {
      throw ValidationError(
          fmt::format("location target outside [0, {}]: {}..{}", p.size(3) - 1, lo, hi));
    }
  }
}

torch::Tensor nll_sum(const torch::Tensor& logp, const torch::Tensor& targets) {
  // -sum log p[target] per sample, then batch mean.
  auto picked = logp.gather(-1, targets.unsqueeze(-1)).squeeze(-1);
  return -picked.flatten(1).sum(1).mean();
}

torch::Tensor adjacent_l1(const torch::Tensor& p) {
  if (p.dim() != 4) throw ShapeError("similarity loss expects [B, C, h, w+1]");
  if (p.size(2) < 2) return p.sum() * 0;
  auto d = p.slice(2, 0, p.size(2) - 1) - p.slice(2, 1, p.size(2));
  return d.abs().flatten(1).sum(1).mean();
}

}  // namespace

torch::Tensor loc_loss(const torch::Tensor& logits, const torch::Tensor& targets) {
  check_loc(logits, targets);
  return nll_sum(torch::log_softmax(logits, -1), targets);
}

torch::Tensor loc_loss_probs(const torch::Tensor& probs, const torch::Tensor& targets) {
  check_loc(probs, targets);
  return nll_sum(torch::log(probs), targets);
}

torch::Tensor sim_loss(const torch::Tensor& logits) {
  return adjacent_l1(torch::softmax(logits, -1));
}

torch::Tensor sim_loss_probs(const torch::Tensor& probs) { return adjacent_l1(probs); }

torch::Tensor seg_loss(const torch::Tensor& logits, const torch::Tensor& targets) {
  if (logits.dim() != 4 || targets.dim() != 3 || logits.size(0) != targets.size(0) ||
      logits.size(2) != targets.size(1) || logits.size(3) != targets.size(2)) {
    throw ShapeError(fmt::format("segmentation logits {} do not match targets {}",
                                 fmt::join(logits.sizes(), "x"),
                                 fmt::join(targets.sizes(), "x")));
  }
  const auto lo = targets.min().item<int64_t>(), hi = targets.max().item<int64_t>();
  if (lo < 0 || hi >= logits.size(1)) {
    throw ValidationError(fmt::format("segmentation class outside [0, {}]: {}..{}",
                                      logits.size(1) - 1, lo, hi));
  }
  auto logp = torch::log_softmax(logits, 1);
  return -logp.gather(1, targets.unsqueeze(1)).mean();
}

torch::Tensor cls_loss(const torch::Tensor& logits, const torch::Tensor& targets,
                       const torch::Tensor& mask) {
  if (logits.dim() != 3 || targets.sizes() != logits.sizes().slice(0, 2) ||
      mask.sizes() != targets.sizes()) {
    throw ShapeError("class logits, targets and mask disagree in shape");
  }
  // Targets under the mask may be placeholders (-1); clamp before gathering.
  auto safe = targets.clamp(0, logits.size(2) - 1);
  if (mask.any().item<bool>()) {
    const auto live = targets.masked_select(mask);
    if (live.min().item<int64_t>() < 0 || live.max().item<int64_t>() >= logits.size(2)) {
      throw ValidationError("class target out of range for a present lane");
    }
  }
  auto nll = -torch::log_softmax(logits, -1).gather(-1, safe.unsqueeze(-1)).squeeze(-1);
  return (nll * mask.to(nll.dtype())).sum(1).mean();
}

void TaskLossWeights::validate() const {
  if (alpha < 0 || beta < 0 || gamma < 0) throw ConfigError("task loss weights must be >= 0");
}

TaskLoss task_loss(const DetectorOutput& out, const TargetBatch& t, const TaskLossWeights& w) {
  w.validate();
  TaskLoss l;
  l.loc = loc_loss(out.loc, t.loc);
  l.sim = sim_loss(out.loc);
  l.cls = cls_loss(out.cls, t.cls, t.cls_mask);
  l.seg = (out.seg.defined() && t.seg.defined() && w.beta > 0) ? seg_loss(out.seg, t.seg)
                                                               : torch::zeros_like(l.loc);
  l.total = l.loc + w.alpha * l.sim + w.beta * l.seg + w.gamma * l.cls;
  return l;
}

}  // namespace s2r::detector
