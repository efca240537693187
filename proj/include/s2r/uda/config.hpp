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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2r/data/augment.hpp"
#include "s2r/detector/losses.hpp"
#include "s2r/detector/model.hpp"
#include "s2r/translation/losses.hpp"
#include "s2r/translation/model.hpp"
#include "s2r/uda/objectives.hpp"

namespace s2r::uda {

enum class Strategy {
  kDirect,
  kTwoStageUnit,
  kTwoStageMunit,
  kAda,
  kUnitAdv,
  kMunitAdv,
  kSupervisedReal,
};

std::string to_string(Strategy s);
// Accepts "two_stage_unit" and the command-line spelling "two-stage-unit";
// "real" is an alias of supervised_real.
Strategy strategy_from_string(const std::string& name);
const std::vector<Strategy>& all_strategies();

bool is_generative(Strategy s);  // joint translator + detector loop
bool is_two_stage(Strategy s);
translation::Mode translation_mode(Strategy s);

struct LearningRates {
  double detector = 4e-4;
  double discriminator = 4e-4;
  double generator = 1e-4;
};

struct StrategyConfig {
  Strategy strategy = Strategy::kDirect;
  GenLossWeights gen_weights;
  detector::TaskLossWeights task_weights;
  LearningRates lr;
  int warmup_epochs = 25;  // generative loops only
  int max_epochs = 100;
  int batch_size = 8;
  std::vector<std::uint64_t> seeds{0, 1, 2};

  detector::DetectorConfig detector;
  translation::TranslationConfig translation;
  translation::PerceptualConfig perceptual;
  data::AugmentationParams augmentation;
  int fea_disc_width = 64;
  double score_eps = kScoreEps;
  int seg_stroke_px = 5;

  // Stage 1 length of the two-stage strategies; max_epochs when unset.
  std::optional<int> translation_epochs;
  // When > 0, every epoch draws this many sim frames afresh from the full set.
  std::size_t epoch_samples = 0;
  int eval_every = 1;
  int eval_batch = 8;
  // Accuracy of the detector on the unaugmented training frames per evaluation.
  bool log_train_accuracy = false;
  // Otherwise only the latest and the best epoch checkpoints are kept.
  bool keep_all_checkpoints = false;

  void validate() const;
};

void to_json(nlohmann::json& j, const StrategyConfig& c);
StrategyConfig strategy_config_from_json(const nlohmann::json& j);
StrategyConfig load_strategy_config(const std::filesystem::path& file);

}  // namespace s2r::uda
