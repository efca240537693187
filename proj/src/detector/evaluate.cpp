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

#include "s2r/detector/evaluate.hpp"

#include <cmath>

#include "s2r/detector/targets.hpp"
#include "s2r/errors.hpp"
#include "s2r/lane/metrics.hpp"

namespace s2r::detector {

std::vector<FramePrediction> predict(const DetectorOutput& out, const lane::RowAnchorConfig& cfg) {
  torch::NoGradGuard guard;
  auto probs = torch::softmax(out.loc, -1).to(torch::kFloat64).contiguous();
  auto logits = out.cls.to(torch::kFloat64).contiguous();
  std::vector<FramePrediction> preds;
  for (int64_t i = 0; i < probs.size(0); ++i) {
    auto p = probs[i].contiguous();
    auto c = logits[i].contiguous();
    FramePrediction fp;
    fp.lanes = lane::decode_prediction(
        std::span<const double>(p.data_ptr<double>(), p.numel()), cfg);
    fp.classes = lane::decode_classes(
        std::span<const double>(c.data_ptr<double>(), c.numel()), cfg.num_lanes());
    preds.push_back(std::move(fp));
  }
  return preds;
}

lane::LanePointLabel align_to_anchor_rows(const lane::LanePointLabel& gt,
                                          const lane::RowAnchorConfig& cfg) {
  const auto rows = cfg.native_h_samples();
  if (gt.h_samples == rows) return gt;
  lane::LanePointLabel out;
  out.h_samples = rows;
  for (const auto& l : gt.lanes) {
    lane::Lane al;
    al.raw_class = l.raw_class;
    al.xs.assign(rows.size(), lane::kAbsent);
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t r = 0; r < gt.h_samples.size(); ++r) {
        if (std::abs(gt.h_samples[r] - rows[a]) <= 0.5) {
          al.xs[a] = l.xs[r];
          break;
        }
      }
    }
    out.lanes.push_back(std::move(al));
  }
  return out;
}

EvalResult evaluate(const ForwardFn& forward, const data::Dataset& ds,
                    const lane::RowAnchorConfig& cfg, int batch_size) {
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  torch::NoGradGuard guard;
  lane::MetricAccumulator det;
  lane::ClassificationAccumulator cls;
  EvalResult result;
  std::vector<cv::Mat> images;
  std::vector<const data::FrameSample*> pending;
  auto flush = [&] {
    if (pending.empty()) return;
    const auto out = forward(images_to_tensor(images, cfg.input_size()));
    const auto preds = predict(out, cfg);
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto gt = align_to_anchor_rows(*pending[i]->label, cfg);
      det.add(preds[i].lanes, gt);
      std::vector<std::optional<lane::SuperClass>> gt_cls(cfg.num_lanes());
      for (int k = 0; k < cfg.num_lanes() && k < static_cast<int>(gt.lanes.size()); ++k) {
        const auto& l = gt.lanes[k];
        if (l.present() && ds.mapping && ds.mapping->contains(l.raw_class)) {
          gt_cls[k] = ds.mapping->map(l.raw_class);
        }
      }
      cls.add(preds[i].classes, gt_cls);
      ++result.frames;
    }
    images.clear();
    pending.clear();
  };
  for (const auto& s : ds.samples) {
    if (!s.label) continue;
    if (s.image.cols != cfg.native_size().width || s.image.rows != cfg.native_size().height) {
      throw ConfigError("evaluation image " + s.source + " is not the configured native size");
    }
    images.push_back(s.image);
    pending.push_back(&s);
    if (static_cast<int>(pending.size()) == batch_size) flush();
  }
  flush();
  result.det_acc = det.accuracy();
  if (cls.total() > 0) result.cls_acc = cls.accuracy();
  return result;
}

}  // namespace s2r::detector
