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

#include <torch/torch.h>

#include "s2r/detector/model.hpp"

namespace s2r::detector {

// Batched losses: per-sample sums as in the single-image definitions,
// averaged over the batch.

// logits [B, C, h, w+1], targets int64 [B, C, h] in [0, w].
torch::Tensor loc_loss(const torch::Tensor& logits, const torch::Tensor& targets);
// Same, on probabilities that are already softmax-normalised.
torch::Tensor loc_loss_probs(const torch::Tensor& probs, const torch::Tensor& targets);

// Sum over lanes and adjacent anchor pairs of the L1 distance between the
// softmax distributions.
torch::Tensor sim_loss(const torch::Tensor& logits);
torch::Tensor sim_loss_probs(const torch::Tensor& probs);

// logits [B, C+1, H, W], targets int64 [B, H, W]; mean over all pixels.
torch::Tensor seg_loss(const torch::Tensor& logits, const torch::Tensor& targets);

// logits [B, C, K], targets int64 [B, C], mask bool [B, C]. Cross-entropy
// summed over masked-in lanes.
torch::Tensor cls_loss(const torch::Tensor& logits, const torch::Tensor& targets,
                       const torch::Tensor& mask);

struct TaskLossWeights {
  double alpha = 1.0;  // sim
  double beta = 1.0;   // seg
  double gamma = 0.1;  // cls

  void validate() const;
};

struct TargetBatch {
  torch::Tensor loc;       // int64 [B, C, h]
  torch::Tensor cls;       // int64 [B, C]
  torch::Tensor cls_mask;  // bool [B, C]
  torch::Tensor seg;       // int64 [B, H/8, W/8]
};

struct TaskLoss {
  torch::Tensor total, loc, sim, seg, cls;
};

// Segmentation is skipped when the output has no segmentation logits or
// beta is zero.
TaskLoss task_loss(const DetectorOutput& out, const TargetBatch& targets,
                   const TaskLossWeights& w);

}  // namespace s2r::detector
