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

#include "s2r/uda/config.hpp"

#include <algorithm>
#include <fstream>

namespace s2r::uda {

namespace {

struct Named {
  Strategy s;
  const char* name;
  const char* cli;
};

constexpr Named kNames[] = {
    {Strategy::kDirect, "direct", "direct"},
    {Strategy::kTwoStageUnit, "two_stage_unit", "two-stage-unit"},
    {Strategy::kTwoStageMunit, "two_stage_munit", "two-stage-munit"},
    {Strategy::kAda, "ada", "ada"},
    {Strategy::kUnitAdv, "unit_adv", "unit-adv"},
    {Strategy::kMunitAdv, "munit_adv", "munit-adv"},
    {Strategy::kSupervisedReal, "supervised_real", "real"},
};

}  // namespace

std::string to_string(Strategy s) {
  for (const auto& n : kNames) {
    if (n.s == s) return n.name;
  }
  throw ConfigError("unknown strategy");
}

Strategy strategy_from_string(const std::string& name) {
  for (const auto& n : kNames) {
    if (name == n.name || name == n.cli) return n.s;
  }
  throw ConfigError("unknown strategy '" + name + "'");
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all = [] {
    std::vector<Strategy> v;
    for (const auto& n : kNames) v.push_back(n.s);
    return v;
  }();
  return all;
}

bool is_generative(Strategy s) { return s == Strategy::kUnitAdv || s == Strategy::kMunitAdv; }
bool is_two_stage(Strategy s) {
  return s == Strategy::kTwoStageUnit || s == Strategy::kTwoStageMunit;
}

translation::Mode translation_mode(Strategy s) {
  return s == Strategy::kTwoStageMunit || s == Strategy::kMunitAdv ? translation::Mode::kMunit
                                                                   : translation::Mode::kUnit;
}

void StrategyConfig::validate() const {
  gen_weights.validate();
  task_weights.validate();
  if (!(lr.detector > 0) || !(lr.discriminator > 0) || !(lr.generator > 0)) {
    throw ConfigError("learning rates must be positive");
  }
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (translation_epochs && *translation_epochs < 1) {
    throw ConfigError("translation_epochs must be at least 1");
  }
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be nonnegative");
  if ((is_generative(strategy) || is_two_stage(strategy)) &&
      warmup_epochs >= std::min(max_epochs, translation_epochs.value_or(max_epochs))) {
    throw ConfigError("warmup_epochs must be below the number of training epochs");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (eval_every < 1 || eval_batch < 1) throw ConfigError("eval_every/eval_batch must be positive");
  if (fea_disc_width < 1) throw ConfigError("fea_disc_width must be positive");
  if (!(score_eps > 0 && score_eps < 0.5)) throw ConfigError("score_eps must lie in (0, 0.5)");
  augmentation.validate();
  translation.validate();
  auto det = detector;
  if (is_generative(strategy)) {
    det.in_channels = translation.latent_channels();
    det.input_stride = translation.stride();
  }
  det.validate();
}

void to_json(nlohmann::json& j, const StrategyConfig& c) {
  j = nlohmann::json::object();
  j["strategy"] = to_string(c.strategy);
  j["gen_weights"] = c.gen_weights;
  j["task_weights"] = {{"alpha", c.task_weights.alpha},
                       {"beta", c.task_weights.beta},
                       {"gamma", c.task_weights.gamma}};
  j["lr"] = {{"detector", c.lr.detector},
             {"discriminator", c.lr.discriminator},
             {"generator", c.lr.generator}};
  j["warmup_epochs"] = c.warmup_epochs;
  j["max_epochs"] = c.max_epochs;
  j["batch_size"] = c.batch_size;
  j["seeds"] = c.seeds;
  j["detector"] = c.detector;
  j["translation"] = c.translation;
  j["perceptual"] = {{"weights", c.perceptual.weights.string()},
                     {"width_divisor", c.perceptual.width_divisor},
                     {"seed", c.perceptual.seed}};
  j["augmentation"] = {{"rotation_deg", c.augmentation.rotation_deg},
                       {"shift_x_px", c.augmentation.shift_x_px},
                       {"shift_y_px", c.augmentation.shift_y_px}};
  j["fea_disc_width"] = c.fea_disc_width;
  j["score_eps"] = c.score_eps;
  j["seg_stroke_px"] = c.seg_stroke_px;
  j["translation_epochs"] =
      c.translation_epochs ? nlohmann::json(*c.translation_epochs) : nlohmann::json(nullptr);
  j["epoch_samples"] = c.epoch_samples;
  j["eval_every"] = c.eval_every;
  j["eval_batch"] = c.eval_batch;
  j["log_train_accuracy"] = c.log_train_accuracy;
  j["keep_all_checkpoints"] = c.keep_all_checkpoints;
}

StrategyConfig strategy_config_from_json(const nlohmann::json& j) {
  try {
    StrategyConfig c;
    if (!j.is_object()) throw ConfigError("strategy config must be a JSON object");
    if (j.contains("strategy")) c.strategy = strategy_from_string(j.at("strategy"));
    if (j.contains("gen_weights")) c.gen_weights = gen_loss_weights_from_json(j.at("gen_weights"));
    if (j.contains("task_weights")) {
      const auto& t = j.at("task_weights");
      c.task_weights.alpha = t.value("alpha", c.task_weights.alpha);
      c.task_weights.beta = t.value("beta", c.task_weights.beta);
      c.task_weights.gamma = t.value("gamma", c.task_weights.gamma);
    }
    if (j.contains("lr")) {
      const auto& l = j.at("lr");
      c.lr.detector = l.value("detector", c.lr.detector);
      c.lr.discriminator = l.value("discriminator", c.lr.discriminator);
      c.lr.generator = l.value("generator", c.lr.generator);
    }
    c.warmup_epochs = j.value("warmup_epochs", c.warmup_epochs);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("detector")) c.detector = detector::detector_config_from_json(j.at("detector"));
    if (j.contains("translation")) {
      c.translation = translation::translation_config_from_json(j.at("translation"));
    }
    if (j.contains("perceptual")) {
      const auto& p = j.at("perceptual");
      c.perceptual.weights = p.value("weights", std::string());
      c.perceptual.width_divisor = p.value("width_divisor", c.perceptual.width_divisor);
      c.perceptual.seed = p.value("seed", c.perceptual.seed);
    }
    if (j.contains("augmentation")) {
      const auto& a = j.at("augmentation");
      c.augmentation.rotation_deg = a.value("rotation_deg", c.augmentation.rotation_deg);
      c.augmentation.shift_x_px = a.value("shift_x_px", c.augmentation.shift_x_px);
      c.augmentation.shift_y_px = a.value("shift_y_px", c.augmentation.shift_y_px);
    }
    c.fea_disc_width = j.value("fea_disc_width", c.fea_disc_width);
    c.score_eps = j.value("score_eps", c.score_eps);
    c.seg_stroke_px = j.value("seg_stroke_px", c.seg_stroke_px);
    if (j.contains("translation_epochs") && !j.at("translation_epochs").is_null()) {
      c.translation_epochs = j.at("translation_epochs").get<int>();
    }
    c.epoch_samples = j.value("epoch_samples", c.epoch_samples);
    c.eval_every = j.value("eval_every", c.eval_every);
    c.eval_batch = j.value("eval_batch", c.eval_batch);
    c.log_train_accuracy = j.value("log_train_accuracy", c.log_train_accuracy);
    c.keep_all_checkpoints = j.value("keep_all_checkpoints", c.keep_all_checkpoints);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad strategy config: ") + e.what());
  }
}

StrategyConfig load_strategy_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return strategy_config_from_json(j);
}

}  // namespace s2r::uda
