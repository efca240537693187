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

#include "s2r/lane/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "s2r/errors.hpp"

namespace s2r::lane {

FrameTally score_frame(const LanePointLabel& pred, const LanePointLabel& gt,
                       double width_threshold_px) {
  if (width_threshold_px <= 0.0) {
    throw ConfigError("width threshold must be positive");
  }
  if (pred.h_samples != gt.h_samples) {
    throw ValidationError("prediction and ground truth use different h_samples");
  }

  FrameTally tally;
  const std::size_t G = gt.lanes.size();
  const std::size_t P = pred.lanes.size();
  std::vector<double> mean_x(G, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    const auto& xs = gt.lanes[g].xs;
    double sum = 0.0;
    std::size_t n = 0;
    for (double x : xs) {
      if (x >= 0.0) {
        sum += x;
        ++n;
      }
    }
    tally.total += n;
    mean_x[g] = n > 0 ? sum / n : 0.0;
  }

  // counts[g * P + p]: points of gt lane g hit by predicted lane p.
  std::vector<std::size_t> counts(G * P, 0);
  for (std::size_t g = 0; g < G; ++g) {
    const auto& gx = gt.lanes[g].xs;
    for (std::size_t p = 0; p < P; ++p) {
      const auto& px = pred.lanes[p].xs;
      for (std::size_t r = 0; r < gx.size(); ++r) {
        if (gx[r] < 0.0 || px[r] < 0.0) continue;
        if (std::abs(px[r] - gx[r]) < width_threshold_px) ++counts[g * P + p];
      }
    }
  }

  // Ground-truth lanes ordered left to right for tie-breaking.
  std::vector<std::size_t> order(G);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean_x[a] < mean_x[b]; });

  std::vector<bool> gt_used(G, false), pred_used(P, false);
  while (true) {
    std::size_t best = 0;
    std::size_t best_g = G, best_p = P;
    for (std::size_t g : order) {
      if (gt_used[g]) continue;
      for (std::size_t p = 0; p < P; ++p) {
        if (pred_used[p]) continue;
        if (counts[g * P + p] > best) {
          best = counts[g * P + p];
          best_g = g;
          best_p = p;
        }
      }
    }
    if (best == 0) break;
    gt_used[best_g] = true;
    pred_used[best_p] = true;
    tally.correct += best;
  }
  return tally;
}

MetricAccumulator::MetricAccumulator(double width_threshold_px)
    : threshold_(width_threshold_px) {
  if (threshold_ <= 0.0) throw ConfigError("width threshold must be positive");
}

void MetricAccumulator::add(const LanePointLabel& pred, const LanePointLabel& gt) {
  const FrameTally t = score_frame(pred, gt, threshold_);
  correct_ += t.correct;
  total_ += t.total;
  frames_.push_back(t);
}

double MetricAccumulator::accuracy() const {
  if (total_ == 0) {
    throw UndefinedMetricError("detection accuracy undefined: no ground-truth points");
  }
  return static_cast<double>(correct_) / static_cast<double>(total_);
}

double tusimple_accuracy(std::span<const LanePointLabel> preds,
                         std::span<const LanePointLabel> gts,
                         double width_threshold_px) {
  if (preds.size() != gts.size()) {
    throw ValidationError("got " + std::to_string(preds.size()) +
                          " predictions for " + std::to_string(gts.size()) +
                          " ground-truth frames");
  }
  MetricAccumulator acc(width_threshold_px);
  for (std::size_t k = 0; k < preds.size(); ++k) acc.add(preds[k], gts[k]);
  return acc.accuracy();
}

void ClassificationAccumulator::add(std::span<const SuperClass> pred,
                                    std::span<const std::optional<SuperClass>> gt) {
  if (pred.size() != gt.size()) {
    throw ValidationError("class prediction count differs from ground truth");
  }
  for (std::size_t k = 0; k < gt.size(); ++k) {
    if (!gt[k]) continue;
    ++total_;
    if (pred[k] == *gt[k]) ++correct_;
  }
}

double ClassificationAccumulator::accuracy() const {
  if (total_ == 0) {
    throw UndefinedMetricError("classification accuracy undefined: no present lanes");
  }
  return static_cast<double>(correct_) / static_cast<double>(total_);
}

double classification_accuracy(std::span<const SuperClass> pred,
                               std::span<const std::optional<SuperClass>> gt) {
  ClassificationAccumulator acc;
  acc.add(pred, gt);
  return acc.accuracy();
}

}  // namespace s2r::lane
