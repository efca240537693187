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

#include "s2r/uda/train.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "s2r/data/batching.hpp"
#include "s2r/detector/checkpoint.hpp"
#include "s2r/detector/targets.hpp"
#include "s2r/errors.hpp"
#include "s2r/translation/export.hpp"
#include "s2r/uda/trainer.hpp"

namespace s2r::uda {

namespace fs = std::filesystem;
using data::Domain;
using nlohmann::json;

void to_json(json& j, const EpochRecord& r) {
  j = json::object();
  j["epoch"] = r.epoch;
  j["steps"] = r.steps;
  j["losses"] = r.losses;
  j["lr"] = r.lr;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["val_det_acc"] = opt(r.val_det_acc);
  j["val_cls_acc"] = opt(r.val_cls_acc);
  j["train_acc"] = opt(r.train_acc);
  j["fea_disc_acc"] = opt(r.fea_disc_acc);
  j["checkpoint"] = r.checkpoint.string();
}

EpochRecord epoch_record_from_json(const json& j) {
  try {
    EpochRecord r;
    r.epoch = j.at("epoch");
    r.steps = j.value("steps", int64_t{0});
    r.losses = j.value("losses", std::map<std::string, double>{});
    r.lr = j.value("lr", 0.0);
    auto opt = [&](const char* key) -> std::optional<double> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return j.at(key).get<double>();
    };
    r.val_det_acc = opt("val_det_acc");
    r.val_cls_acc = opt("val_cls_acc");
    r.train_acc = opt("train_acc");
    r.fea_disc_acc = opt("fea_disc_acc");
    r.checkpoint = j.value("checkpoint", std::string());
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad epoch record: ") + e.what(), 0);
  }
}

const EpochRecord& select_best_checkpoint(std::span<const EpochRecord> records) {
  const EpochRecord* best = nullptr;
  for (const auto& r : records) {
    if (!r.val_det_acc) continue;
    if (!best || *r.val_det_acc > *best->val_det_acc ||
        (*r.val_det_acc == *best->val_det_acc && r.epoch < best->epoch)) {
      best = &r;
    }
  }
  if (!best) throw ValidationError("no evaluated epoch to select a checkpoint from");
  return *best;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(s.n));
  return s;
}

namespace {

struct LoopSpec {
  const data::Dataset* labelled = nullptr;
  const data::Dataset* real = nullptr;  // unlabelled partner domain, if the loop uses one
  const data::Dataset* val = nullptr;
  const data::Dataset* heldout_sim = nullptr;
  int epochs = 1;
  fs::path dir;
};

torch::Tensor stack_images(const data::Dataset& ds, std::size_t begin, std::size_t end,
                           lane::ImageSize input) {
  std::vector<cv::Mat> images;
  for (std::size_t i = begin; i < end; ++i) images.push_back(ds.samples[i].image);
  return detector::images_to_tensor(images, input);
}

double train_accuracy(Trainer& t, const StrategyConfig& cfg, const data::Dataset& ds) {
  const auto& anchors = cfg.detector.anchors;
  double correct = 0.0;
  for (std::size_t b = 0; b < ds.size(); b += cfg.eval_batch) {
    const std::size_t e = std::min(ds.size(), b + static_cast<std::size_t>(cfg.eval_batch));
    std::vector<lane::LanePointLabel> labels;
    for (std::size_t i = b; i < e; ++i) labels.push_back(*ds.samples[i].label);
    const auto y = detector::make_targets(labels, anchors, ds.mapping.get(), cfg.seg_stroke_px);
    const auto out = t.infer(stack_images(ds, b, e, anchors.input_size()), Domain::kSim);
    correct += detector::anchor_accuracy(out.loc, y.loc) * static_cast<double>(e - b);
  }
  return correct / static_cast<double>(ds.size());
}

double fea_accuracy(Trainer& t, const StrategyConfig& cfg, const data::Dataset& sim,
                    const data::Dataset& real) {
  const auto input = cfg.detector.anchors.input_size();
  std::size_t right = 0;
  auto run = [&](const data::Dataset& ds, Domain d) {
    for (std::size_t b = 0; b < ds.size(); b += cfg.eval_batch) {
      const std::size_t e = std::min(ds.size(), b + static_cast<std::size_t>(cfg.eval_batch));
      const auto s = t.fea_scores(t.features(stack_images(ds, b, e, input), d));
      right += (d == Domain::kSim ? (s > 0.5) : (s < 0.5)).sum().item<int64_t>();
    }
  };
  run(sim, Domain::kSim);
  run(real, Domain::kReal);
  return static_cast<double>(right) / static_cast<double>(sim.size() + real.size());
}

std::vector<EpochRecord> run_loop(Trainer& t, const StrategyConfig& cfg, const LoopSpec& spec,
                                  std::uint64_t seed, const EpochCallback& on_epoch) {
  fs::create_directories(spec.dir);
  const auto& labelled = *spec.labelled;
  const std::size_t per_epoch = cfg.epoch_samples > 0 ? cfg.epoch_samples : labelled.size();
  if (per_epoch > labelled.size()) {
    throw ConfigError(fmt::format("epoch_samples {} exceeds the {} labelled frames", per_epoch,
                                  labelled.size()));
  }
  const data::Dataset& partner = spec.real ? *spec.real : labelled;
  const data::UnpairedBatchStream stream(per_epoch, partner.size(),
                                         static_cast<std::size_t>(cfg.batch_size),
                                         derive_seed(seed, 1));
  const auto steps = static_cast<int64_t>(stream.steps_per_epoch());
  const int64_t total = steps * spec.epochs;
  const int64_t warmup = steps * cfg.warmup_epochs;
  const bool labelled_batches = t.loop() != Loop::kTranslation;
  const bool evaluates = t.loop() != Loop::kTranslation && spec.val && !spec.val->empty();

  std::ofstream log(spec.dir / "metrics.jsonl", std::ios::trunc);
  if (!log) throw Error("cannot write " + (spec.dir / "metrics.jsonl").string());

  std::vector<EpochRecord> records;
  std::set<fs::path> kept;
  int64_t global = 0;
  for (int e = 0; e < spec.epochs; ++e) {
    std::vector<std::size_t> subset;
    if (cfg.epoch_samples > 0) {
      subset = data::resample_subset(labelled.size(), per_epoch, e, derive_seed(seed, 2));
    }
    std::map<std::string, double> sums;
    std::map<std::string, int> counts;
    for (auto step : stream.epoch(e)) {
      if (!subset.empty()) {
        for (auto& i : step.sim) i = subset[i];
      }
      const auto batch = make_batch(data::gather(step, labelled, partner), cfg,
                                    labelled.mapping.get(), labelled_batches, spec.real != nullptr,
                                    derive_seed(seed, 1000 + static_cast<std::uint64_t>(global)));
      t.schedule(global, total, warmup);
      for (const auto& [k, v] : t.step(batch)) {
        sums[k] += v;
        counts[k] += 1;
      }
      ++global;
    }

    EpochRecord r;
    r.epoch = e + 1;
    r.steps = global;
    for (const auto& [k, v] : sums) r.losses[k] = v / counts[k];
    r.lr = t.loop() == Loop::kTranslation ? t.generator_lr() : t.detector_lr();
    const bool eval_now = (e + 1) % cfg.eval_every == 0 || e + 1 == spec.epochs;
    if (evaluates && eval_now) {
      const auto res = detector::evaluate(t.forward_fn(Domain::kReal), *spec.val,
                                          cfg.detector.anchors, cfg.eval_batch);
      r.val_det_acc = res.det_acc;
      r.val_cls_acc = res.cls_acc;
      if (cfg.log_train_accuracy) r.train_acc = train_accuracy(t, cfg, labelled);
      if ((t.loop() == Loop::kAda || t.loop() == Loop::kGenerative) && spec.heldout_sim &&
          !spec.heldout_sim->empty()) {
        r.fea_disc_acc = fea_accuracy(t, cfg, *spec.heldout_sim, *spec.val);
      }
    }

    auto ck = t.checkpoint();
    ck.meta["epoch"] = r.epoch;
    r.checkpoint = spec.dir / fmt::format("epoch_{:04d}.ckpt", r.epoch);
    ck.meta["record"] = r;
    detector::save_checkpoint(r.checkpoint, ck);
    records.push_back(r);

    if (!cfg.keep_all_checkpoints) {
      std::set<fs::path> keep{r.checkpoint};
      bool any_eval = false;
      for (const auto& x : records) any_eval = any_eval || x.val_det_acc.has_value();
      if (any_eval) keep.insert(select_best_checkpoint(records).checkpoint);
      for (const auto& p : kept) {
        if (!keep.count(p)) fs::remove(p);
      }
      kept = keep;
    }

    log << json(r).dump() << '\n';
    log.flush();
    spdlog::info("[{}] epoch {}/{} lr {:.3g} det {}", to_string(t.loop()), r.epoch, spec.epochs,
                 r.lr, r.val_det_acc ? fmt::format("{:.4f}", *r.val_det_acc) : "-");
    if (on_epoch) on_epoch(r);
  }
  return records;
}

bool fully_labelled(const data::Dataset& ds) {
  for (const auto& s : ds.samples) {
    if (!s.label) return false;
  }
  return true;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

}  // namespace

SeedRun train_seed(const StrategyConfig& cfg, const TrainData& data, std::uint64_t seed,
                   const fs::path& out_dir, const EpochCallback& on_epoch) {
  cfg.validate();
  const Strategy s = cfg.strategy;
  const bool real_labelled = s == Strategy::kSupervisedReal;
  if (real_labelled) {
    if (data.real.empty() || !fully_labelled(data.real)) {
      throw ConfigError("supervised_real needs a labelled real training split");
    }
  } else {
    if (data.sim.empty()) throw ConfigError("sim training set is empty");
    if (!fully_labelled(data.sim)) throw ConfigError("sim training frames must be labelled");
    if (s != Strategy::kDirect && data.real.empty()) {
      throw ConfigError(to_string(s) + " needs unlabelled real training frames");
    }
  }
  if (data.val.empty()) throw ConfigError("a labelled validation split is required");
  if (!fully_labelled(data.val)) throw ConfigError("validation frames must be labelled");

  at::set_num_threads(1);
  fs::create_directories(out_dir);
  json cfg_json = cfg;
  cfg_json["seed"] = seed;
  write_json(out_dir / "config.json", cfg_json);

  SeedRun run;
  run.seed = seed;
  run.dir = out_dir;
  data::Dataset translated;
  const data::Dataset* labelled = real_labelled ? &data.real : &data.sim;

  if (is_two_stage(s)) {
    Trainer stage1(cfg, Loop::kTranslation, seed);
    LoopSpec spec1;
    spec1.labelled = &data.sim;
    spec1.real = &data.real;
    spec1.epochs = cfg.translation_epochs.value_or(cfg.max_epochs);
    spec1.dir = out_dir / "stage1";
    run_loop(stage1, cfg, spec1, seed, {});
    stage1.translator()->eval();
    translation::ExportOptions opt;
    opt.output_dir = out_dir / "translated";
    opt.model_size = cfg.detector.anchors.input_size();
    opt.style_seed = derive_seed(seed, 3);
    opt.batch_size = cfg.eval_batch;
    const auto manifest = translation::export_translated(stage1.translator(), data.sim,
                                                         Domain::kReal, opt);
    translated = data::load_dataset(data::load_manifest(manifest, data::Split::kTrain),
                                    Domain::kSim, {.require_labels = true});
    translated.mapping = data.sim.mapping;
    labelled = &translated;
  }

  const Loop loop = loop_for(s, is_two_stage(s) ? 1 : 0);
  Trainer trainer(cfg, loop, seed);
  LoopSpec spec;
  spec.labelled = labelled;
  if (loop == Loop::kAda || loop == Loop::kGenerative) spec.real = &data.real;
  spec.val = &data.val;
  spec.heldout_sim = &data.sim_heldout;
  spec.epochs = cfg.max_epochs;
  spec.dir = out_dir;
  run.epochs = run_loop(trainer, cfg, spec, seed, on_epoch);
  run.best = select_best_checkpoint(run.epochs);
  write_json(out_dir / "best.json", json(run.best));
  return run;
}

RunResult train(const StrategyConfig& cfg, const TrainData& data, const fs::path& out_dir) {
  RunResult result;
  result.strategy = cfg.strategy;
  for (auto seed : cfg.seeds) {
    auto run = train_seed(cfg, data, seed, out_dir / fmt::format("seed_{}", seed));
    result.det_acc.push_back(*run.best.val_det_acc);
    if (run.best.val_cls_acc) result.cls_acc.push_back(*run.best.val_cls_acc);
    result.runs.push_back(std::move(run));
  }
  result.det = summarize(result.det_acc);
  result.cls = summarize(result.cls_acc);
  json summary = {{"strategy", to_string(cfg.strategy)},
                  {"stddev", "population"},
                  {"seeds", cfg.seeds},
                  {"val_det_acc", result.det_acc},
                  {"val_cls_acc", result.cls_acc},
                  {"det_mean", result.det.mean},
                  {"det_stddev", result.det.stddev},
                  {"cls_mean", result.cls.mean},
                  {"cls_stddev", result.cls.stddev}};
  write_json(out_dir / "summary.json", summary);
  return result;
}

detector::ForwardFn LoadedModel::forward(Domain d) {
  auto det = detector;
  auto tr = translator;
  det->eval();
  if (tr) tr->eval();
  return [det, tr, d](const torch::Tensor& x) mutable {
    torch::NoGradGuard g;
    if (tr) return det->forward(tr->encode(x, d, false).content);
    return det->forward(x);
  };
}

LoadedModel load_model(const fs::path& path) {
  const auto ck = detector::load_checkpoint(path);
  if (!ck.meta.contains("detector")) {
    throw LoadError(path.string() + " holds no detector (translation-stage checkpoint?)");
  }
  LoadedModel m;
  m.meta = ck.meta;
  try {
    m.config = detector::detector_config_from_json(ck.meta.at("detector"));
    m.detector = detector::Detector(m.config);
    detector::restore_state(*m.detector, "detector.", ck.tensors);
    if (ck.meta.value("loop", std::string()) == to_string(Loop::kGenerative)) {
      m.translator =
          translation::Translator(translation::translation_config_from_json(ck.meta.at("translation")));
      detector::restore_state(*m.translator, "translator.", ck.tensors);
    }
  } catch (const ConfigError& e) {
    throw LoadError(path.string() + ": " + e.what());
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return m;
}

}  // namespace s2r::uda
