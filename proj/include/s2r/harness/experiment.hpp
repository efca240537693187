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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2r/data/dataset.hpp"
#include "s2r/uda/config.hpp"
#include "s2r/uda/train.hpp"

namespace s2r::harness {

// Metrics are percentages. Det-Acc comes from the test split, Cls-Acc from
// the validation split.
struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  double det_acc = 0.0;
  std::optional<double> cls_acc;
  std::string error;
  std::filesystem::path checkpoint;
};

struct StrategyReport {
  uda::Strategy strategy = uda::Strategy::kDirect;
  std::vector<SeedOutcome> seeds;
  uda::Summary det, cls;
  std::size_t failures = 0;
};

struct AblationPoint {
  int multiplier = 1;
  std::size_t sim_frames = 0;
  StrategyReport result;
};

struct AblationCurve {
  uda::Strategy strategy = uda::Strategy::kDirect;
  std::vector<AblationPoint> points;
};

struct AggregateReport {
  std::vector<StrategyReport> strategies;
  std::vector<AblationCurve> ablation;
};

void to_json(nlohmann::json& j, const AggregateReport& r);
AggregateReport report_from_json(const nlohmann::json& j);
// Statistics recomputed from the stored per-seed records.
AggregateReport reaggregate(const AggregateReport& stored);
std::string markdown_table(const AggregateReport& r);

// Population statistics over the successful seeds.
StrategyReport summarize_outcomes(uda::Strategy s, std::vector<SeedOutcome> outcomes);

struct ExperimentSpec {
  std::vector<uda::Strategy> strategies{uda::Strategy::kDirect};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::filesystem::path sim_manifest;   // labelled sim frames (train split)
  std::filesystem::path real_manifest;  // real train/val/test splits
  std::vector<int> multipliers{1, 2, 3, 4, 5};
  std::filesystem::path output_dir;
  uda::StrategyConfig training;

  void validate() const;
};

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment_spec(const std::filesystem::path& file);

struct ExperimentData {
  data::Dataset sim;
  data::Dataset sim_val;  // optional held-out sim frames
  data::Dataset real_train, real_val, real_test;
};

ExperimentData load_experiment_data(const ExperimentSpec& spec);

// Real training frames lose their labels unless the strategy is the
// supervised upper bound.
uda::TrainData train_data_for(const ExperimentData& data, uda::Strategy strategy,
                              const data::Dataset& sim);

// Trains one (strategy, seed) on `sim` and returns its metrics.
using SeedTrainer = std::function<SeedOutcome(const uda::StrategyConfig& cfg,
                                              const data::Dataset& sim, std::uint64_t seed,
                                              const std::filesystem::path& out_dir)>;

// uda::train_seed, then the selected checkpoint evaluated on the test split.
SeedTrainer default_trainer(const ExperimentData& data);

// Every (strategy, seed); failures are recorded, not dropped. Writes
// report.json and report.md into spec.output_dir.
AggregateReport run_experiment(const ExperimentSpec& spec, const data::Dataset& sim,
                               const SeedTrainer& trainer);

// Direct and ADA on independent m x real_train_size subsets of `full_sim`,
// each epoch resampling real_train_size frames. Writes ablation.csv,
// ablation_det.png, ablation_cls.png and ablation.json.
AggregateReport run_ablation(const ExperimentSpec& spec, const data::Dataset& full_sim,
                             std::size_t real_train_size, const SeedTrainer& trainer);

// Indices of the m-multiplier subset; reproducible from (seed, m).
std::vector<std::size_t> ablation_subset(std::size_t full_size, std::size_t subset_size,
                                         int multiplier, std::uint64_t seed);

}  // namespace s2r::harness
