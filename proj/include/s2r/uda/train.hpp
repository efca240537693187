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
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2r/data/dataset.hpp"
#include "s2r/detector/evaluate.hpp"
#include "s2r/detector/model.hpp"
#include "s2r/translation/model.hpp"
#include "s2r/uda/config.hpp"

namespace s2r::uda {

struct TrainData {
  data::Dataset sim;          // labelled
  data::Dataset real;         // training split; labels only used by supervised_real
  data::Dataset val;          // labelled real validation split, used for model selection
  data::Dataset sim_heldout;  // optional, for the feature-discriminator accuracy
};

struct EpochRecord {
  int epoch = 0;       // 1-based
  int64_t steps = 0;   // global steps completed
  std::map<std::string, double> losses;  // epoch means
  double lr = 0.0;     // detector (or generator) rate at the last step
  std::optional<double> val_det_acc, val_cls_acc;
  std::optional<double> train_acc;     // row-anchor accuracy on unaugmented training frames
  std::optional<double> fea_disc_acc;  // held-out domain accuracy of the feature discriminator
  std::filesystem::path checkpoint;
};

void to_json(nlohmann::json& j, const EpochRecord& r);
EpochRecord epoch_record_from_json(const nlohmann::json& j);

// Highest validation detection accuracy, earliest epoch on ties. Records
// without a validation result are skipped; none at all raises ValidationError.
const EpochRecord& select_best_checkpoint(std::span<const EpochRecord> records);

struct SeedRun {
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  std::vector<EpochRecord> epochs;
  EpochRecord best;
};

// Population statistics (divisor n).
struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};
Summary summarize(std::span<const double> values);

struct RunResult {
  Strategy strategy = Strategy::kDirect;
  std::vector<SeedRun> runs;
  std::vector<double> det_acc;  // per seed, best-epoch validation values
  std::vector<double> cls_acc;  // per seed where defined
  Summary det, cls;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains one seed into `out_dir`: metrics.jsonl (one record per epoch),
// epoch_NNNN.ckpt files and best.json. Two-stage strategies also write
// stage1/ (translator log and checkpoint) and translated/ (exported frames).
SeedRun train_seed(const StrategyConfig& cfg, const TrainData& data, std::uint64_t seed,
                   const std::filesystem::path& out_dir, const EpochCallback& on_epoch = {});

// Every seed of cfg.seeds under out_dir/seed_<n>, plus summary.json.
RunResult train(const StrategyConfig& cfg, const TrainData& data,
                const std::filesystem::path& out_dir);

// A trained detector restored from an epoch checkpoint, ready for evaluation
// on real frames.
struct LoadedModel {
  nlohmann::json meta;
  detector::DetectorConfig config;
  detector::Detector detector{nullptr};
  translation::Translator translator{nullptr};  // joint generative strategies only
  detector::ForwardFn forward(data::Domain d = data::Domain::kReal);
};

LoadedModel load_model(const std::filesystem::path& checkpoint);

}  // namespace s2r::uda
