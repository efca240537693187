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

#include "s2r/uda/trainer.hpp"

#include <vector>

#include "s2r/data/augment.hpp"
#include "s2r/detector/losses.hpp"
#include "s2r/detector/targets.hpp"
#include "s2r/errors.hpp"

namespace s2r::uda {

namespace nn = torch::nn;
using data::Domain;
using translation::Mode;

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double scalar(const torch::Tensor& t) { return t.detach().to(torch::kFloat64).item<double>(); }

torch::Tensor lsgan_g(const std::vector<torch::Tensor>& generated) {
  torch::Tensor total;
  for (const auto& o : generated) {
    auto l = (o - 1).pow(2).mean();
    total = total.defined() ? total + l : l;
  }
  return total;
}

std::vector<torch::Tensor> concat(std::vector<torch::Tensor> a, const std::vector<torch::Tensor>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void set_lr(torch::optim::Adam* opt, double lr) {
  if (!opt) return;
  for (auto& g : opt->param_groups()) static_cast<torch::optim::AdamOptions&>(g.options()).lr(lr);
}

std::unique_ptr<torch::optim::Adam> make_adam(std::vector<torch::Tensor> params, double lr) {
  if (params.empty()) return nullptr;
  return std::make_unique<torch::optim::Adam>(
      std::move(params), torch::optim::AdamOptions(lr).betas({0.9, 0.999}));
}

void add_task(StepLosses& out, const std::string& prefix, const detector::TaskLoss& t) {
  out[prefix] = scalar(t.total);
  out[prefix + "_loc"] = scalar(t.loc);
  out[prefix + "_sim"] = scalar(t.sim);
  if (t.seg.defined()) out[prefix + "_seg"] = scalar(t.seg);
  out[prefix + "_cls"] = scalar(t.cls);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix(mix(seed) ^ stream);
}

FeatureDiscriminatorImpl::FeatureDiscriminatorImpl(int in_channels, int width) {
  c1 = register_module("c1", nn::Conv2d(nn::Conv2dOptions(in_channels, width, 3).padding(1)));
  c2 = register_module("c2",
                       nn::Conv2d(nn::Conv2dOptions(width, width, 3).stride(2).padding(1)));
  out = register_module("out", nn::Linear(width, 1));
}

torch::Tensor FeatureDiscriminatorImpl::forward(const torch::Tensor& f) {
  auto x = torch::leaky_relu(c1->forward(f), 0.2);
  x = torch::leaky_relu(c2->forward(x), 0.2);
  x = x.mean({2, 3});
  return torch::sigmoid(out->forward(x)).squeeze(1);
}

std::string to_string(Loop loop) {
  switch (loop) {
    case Loop::kSupervised: return "supervised";
    case Loop::kAda: return "ada";
    case Loop::kGenerative: return "generative";
    case Loop::kTranslation: return "translation";
  }
  return "?";
}

Loop loop_for(Strategy s, int stage) {
  if (is_two_stage(s)) return stage == 0 ? Loop::kTranslation : Loop::kSupervised;
  if (stage != 0) throw UsageError(to_string(s) + " has a single training stage");
  if (s == Strategy::kAda) return Loop::kAda;
  if (is_generative(s)) return Loop::kGenerative;
  return Loop::kSupervised;
}

TensorBatch make_batch(const data::UnpairedBatch& batch, const StrategyConfig& cfg,
                       const lane::LaneClassMapping* mapping, bool with_targets, bool with_real,
                       std::uint64_t augment_seed) {
  const auto input = cfg.detector.anchors.input_size();
  std::vector<cv::Mat> images;
  std::vector<lane::LanePointLabel> labels;
  for (std::size_t i = 0; i < batch.sim.size(); ++i) {
    const auto s = data::augment(batch.sim[i], cfg.augmentation, mix(augment_seed ^ mix(2 * i)));
    images.push_back(s.image);
    if (with_targets) {
      if (!s.label) throw ConfigError("unlabelled frame in a labelled batch: " + s.source);
      labels.push_back(*s.label);
    }
  }
  TensorBatch out;
  out.x_sim = detector::images_to_tensor(images, input);
  if (with_targets) {
    out.y_sim = detector::make_targets(labels, cfg.detector.anchors, mapping, cfg.seg_stroke_px);
  }
  if (with_real) {
    images.clear();
    for (std::size_t i = 0; i < batch.real.size(); ++i) {
      const auto s =
          data::augment(batch.real[i], cfg.augmentation, mix(augment_seed ^ mix(2 * i + 1)));
      images.push_back(s.image);
    }
    out.x_real = detector::images_to_tensor(images, input);
  }
  return out;
}

Trainer::Trainer(const StrategyConfig& cfg, Loop loop, std::uint64_t seed)
    : cfg_(cfg),
      loop_(loop),
      seed_(seed),
      det_cfg_(cfg.detector),
      style_gen_(at::detail::createCPUGenerator(mix(seed ^ 0x5717e))),
      lr_det_(cfg.lr.detector),
      lr_disc_(cfg.lr.discriminator),
      lr_gen_(cfg.lr.generator) {
  cfg_.validate();
  torch::manual_seed(seed);
  const bool generative = loop == Loop::kGenerative || loop == Loop::kTranslation;
  if (generative) {
    auto tcfg = cfg.translation;
    tcfg.mode = translation_mode(cfg.strategy);
    tcfg.noise_seed = mix(seed ^ 0xe7a);
    translator_ = translation::Translator(tcfg);
    if (cfg.gen_weights.l5 > 0) perceptual_ = translation::make_perceptual_net(cfg.perceptual);
  }
  if (loop == Loop::kGenerative) {
    det_cfg_.in_channels = translator_->config().latent_channels();
    det_cfg_.input_stride = translator_->config().stride();
  }
  if (loop != Loop::kTranslation) det_ = detector::Detector(det_cfg_);
  if (loop == Loop::kAda) {
    fea_disc_ = FeatureDiscriminator(det_cfg_.base_width * 8, cfg.fea_disc_width);
  } else if (loop == Loop::kGenerative) {
    fea_disc_ = FeatureDiscriminator(translator_->config().latent_channels(), cfg.fea_disc_width);
  }

  if (det_) det_opt_ = make_adam(det_->parameters(), lr_det_);
  if (translator_) gen_opt_ = make_adam(translator_->codec_parameters(), lr_gen_);
  std::vector<torch::Tensor> disc;
  if (translator_) disc = translator_->discriminator_parameters();
  if (fea_disc_) disc = concat(disc, fea_disc_->parameters());
  disc_opt_ = make_adam(disc, lr_disc_);
}

void Trainer::set_learning_rates(double detector, double discriminator, double generator) {
  lr_det_ = detector;
  lr_disc_ = discriminator;
  lr_gen_ = generator;
  set_lr(det_opt_.get(), detector);
  set_lr(disc_opt_.get(), discriminator);
  set_lr(gen_opt_.get(), generator);
}

void Trainer::schedule(int64_t step, int64_t total_steps, int64_t warmup_steps) {
  const bool warm = loop_ == Loop::kGenerative || loop_ == Loop::kTranslation;
  auto at = [&](double peak) {
    return lr_at(step, LrSchedule{peak, warm ? warmup_steps : 0, total_steps});
  };
  set_learning_rates(at(cfg_.lr.detector), at(cfg_.lr.discriminator), at(cfg_.lr.generator));
}

void Trainer::set_training(bool on) {
  if (det_) det_->train(on);
  if (translator_) translator_->train(on);
  if (fea_disc_) fea_disc_->train(on);
}

StepLosses Trainer::step(const TensorBatch& b) {
  set_training(true);
  switch (loop_) {
    case Loop::kSupervised: return supervised_step(b);
    case Loop::kAda: return ada_step(b, false);
    case Loop::kGenerative:
    case Loop::kTranslation: return generative_step(b, false);
  }
  return {};
}

StepLosses Trainer::discriminator_step(const TensorBatch& b) {
  set_training(true);
  switch (loop_) {
    case Loop::kSupervised: throw UsageError("the supervised loop has no discriminator");
    case Loop::kAda: return ada_step(b, true);
    case Loop::kGenerative:
    case Loop::kTranslation: return generative_step(b, true);
  }
  return {};
}

StepLosses Trainer::supervised_step(const TensorBatch& b) {
  const auto out = det_->forward(b.x_sim);
  const auto t = detector::task_loss(out, b.y_sim, cfg_.task_weights);
  det_opt_->zero_grad();
  t.total.backward();
  det_opt_->step();
  StepLosses l;
  add_task(l, "task", t);
  l["anchor_acc"] = detector::anchor_accuracy(out.loc.detach(), b.y_sim.loc);
  return l;
}

StepLosses Trainer::update_discriminators(const DiscInputs& in) {
  StepLosses l;
  torch::Tensor total;
  if (in.x_sr.defined()) {
    const auto real = translation::lsgan_losses(translator_->discriminator(Domain::kReal)->forward(in.x_real),
                                                translator_->discriminator(Domain::kReal)->forward(in.x_sr));
    const auto sim = translation::lsgan_losses(translator_->discriminator(Domain::kSim)->forward(in.x_sim),
                                               translator_->discriminator(Domain::kSim)->forward(in.x_rs));
    total = real.d + sim.d;
    l["lsgan_d"] = scalar(total);
  }
  if (in.f_sim.defined()) {
    const auto a = adv_fea_losses(fea_disc_->forward(in.f_real), fea_disc_->forward(in.f_sim),
                                  cfg_.score_eps);
    total = total.defined() ? total + a.d_min() : a.d_min();
    l["adv_fea_d"] = scalar(a.d);
    if (a.clamped > 0) l["adv_fea_clamped"] = static_cast<double>(a.clamped);
  }
  disc_opt_->zero_grad();
  total.backward();
  disc_opt_->step();
  return l;
}

StepLosses Trainer::ada_step(const TensorBatch& b, bool disc_only) {
  if (disc_only) {
    torch::Tensor fs, fr;
    {
      torch::NoGradGuard g;
      fs = det_->backbone(b.x_sim);
      fr = det_->backbone(b.x_real);
    }
    return update_discriminators({.f_sim = fs, .f_real = fr});
  }
  const auto out = det_->forward(b.x_sim);
  const auto f_real = det_->backbone(b.x_real);
  auto l = update_discriminators({.f_sim = out.features.detach(), .f_real = f_real.detach()});

  const auto t = detector::task_loss(out, b.y_sim, cfg_.task_weights);
  const auto a = adv_fea_losses(fea_disc_->forward(f_real), fea_disc_->forward(out.features),
                                cfg_.score_eps);
  const auto total = t.total + a.g_min() * cfg_.gen_weights.l6;
  det_opt_->zero_grad();
  total.backward();
  det_opt_->step();
  add_task(l, "task", t);
  l["adv_fea_g"] = scalar(a.g);
  l["total"] = scalar(total);
  l["anchor_acc"] = detector::anchor_accuracy(out.loc.detach(), b.y_sim.loc);
  return l;
}

StepLosses Trainer::generative_step(const TensorBatch& b, bool disc_only) {
  const bool joint = loop_ == Loop::kGenerative;
  const Mode mode = translator_->config().mode;
  if (disc_only) {
    torch::NoGradGuard g;
    const auto pass = translation::generative_pass(*translator_, b.x_sim, b.x_real, true, style_gen_);
    DiscInputs in{b.x_sim, b.x_real, pass.x_sr, pass.x_rs, {}, {}};
    if (joint) {
      in.f_sim = pass.c_sim.content;
      in.f_real = pass.c_real.content;
    }
    torch::AutoGradMode enable(true);
    return update_discriminators(in);
  }

  const auto pass = translation::generative_pass(*translator_, b.x_sim, b.x_real, true, style_gen_);
  DiscInputs in{b.x_sim, b.x_real, pass.x_sr.detach(), pass.x_rs.detach(), {}, {}};
  if (joint) {
    in.f_sim = pass.c_sim.content.detach();
    in.f_real = pass.c_real.content.detach();
  }
  auto l = update_discriminators(in);

  const auto rec = translation::reconstruction_losses(pass, b.x_sim, b.x_real, mode);
  GenComponents<torch::Tensor> c;
  c.recon = rec.recon;
  c.cyc_recon = rec.cyc_recon;
  if (mode == Mode::kMunit) {
    c.recon_c = rec.recon_c;
    c.recon_s = rec.recon_s;
  }
  c.lsgan_g = lsgan_g(translator_->discriminator(Domain::kReal)->forward(pass.x_sr)) +
              lsgan_g(translator_->discriminator(Domain::kSim)->forward(pass.x_rs));
  if (perceptual_) {
    c.vgg = translation::perceptual_loss(b.x_sim, pass.x_sr, *perceptual_) +
            translation::perceptual_loss(b.x_real, pass.x_rs, *perceptual_);
  }
  auto weights = cfg_.gen_weights;
  if (joint) {
    const auto t = detector::task_loss(det_->forward(pass.c_sim.content), b.y_sim, cfg_.task_weights);
    const auto ct = detector::task_loss(det_->forward(pass.c_sr.content), b.y_sim, cfg_.task_weights);
    const auto a = adv_fea_losses(fea_disc_->forward(pass.c_real.content),
                                  fea_disc_->forward(pass.c_sim.content), cfg_.score_eps);
    c.task = t.total;
    c.cyc_task = ct.total;
    c.adv_fea_g = a.g_min();
    add_task(l, "task", t);
    l["cyc_task"] = scalar(ct.total);
    l["adv_fea_g"] = scalar(a.g);
  } else {
    weights.l3 = weights.l4 = weights.l6 = 0.0;
  }
  const auto total = total_generative_loss(c, weights, mode, joint);

  if (gen_opt_) gen_opt_->zero_grad();
  if (det_opt_) det_opt_->zero_grad();
  total.backward();
  if (gen_opt_) gen_opt_->step();
  if (det_opt_) det_opt_->step();

  l["recon"] = scalar(rec.recon);
  l["cyc_recon"] = scalar(rec.cyc_recon);
  if (mode == Mode::kMunit) {
    l["recon_c"] = scalar(rec.recon_c);
    l["recon_s"] = scalar(rec.recon_s);
  }
  l["lsgan_g"] = scalar(*c.lsgan_g);
  if (c.vgg) l["vgg"] = scalar(*c.vgg);
  l["total"] = scalar(total);
  return l;
}

detector::DetectorOutput Trainer::infer(const torch::Tensor& x, Domain d) {
  if (!det_) throw UsageError("the translation stage has no detector");
  set_training(false);
  torch::NoGradGuard g;
  if (loop_ == Loop::kGenerative) return det_->forward(translator_->encode(x, d, false).content);
  return det_->forward(x);
}

detector::ForwardFn Trainer::forward_fn(Domain d) {
  if (!det_) throw UsageError("the translation stage has no detector");
  return [this, d](const torch::Tensor& x) { return infer(x, d); };
}

torch::Tensor Trainer::features(const torch::Tensor& x, Domain d) {
  set_training(false);
  torch::NoGradGuard g;
  if (loop_ == Loop::kAda) return det_->backbone(x);
  if (loop_ == Loop::kGenerative) return translator_->encode(x, d, false).content;
  throw UsageError("loop " + to_string(loop_) + " has no feature discriminator");
}

torch::Tensor Trainer::fea_scores(const torch::Tensor& f) {
  if (!fea_disc_) throw UsageError("loop " + to_string(loop_) + " has no feature discriminator");
  fea_disc_->eval();
  torch::NoGradGuard g;
  return fea_disc_->forward(f);
}

detector::Checkpoint Trainer::checkpoint() const {
  detector::Checkpoint ck;
  ck.meta["strategy"] = to_string(cfg_.strategy);
  ck.meta["loop"] = to_string(loop_);
  ck.meta["seed"] = seed_;
  if (det_) {
    ck.meta["detector"] = det_cfg_;
    detector::collect_state(*det_, "detector.", ck.tensors);
  }
  if (translator_) {
    ck.meta["translation"] = translator_->config();
    detector::collect_state(*translator_, "translator.", ck.tensors);
  }
  if (fea_disc_) detector::collect_state(*fea_disc_, "fea_disc.", ck.tensors);
  return ck;
}

void Trainer::restore(const detector::Checkpoint& ck) {
  if (det_) detector::restore_state(*det_, "detector.", ck.tensors);
  if (translator_) detector::restore_state(*translator_, "translator.", ck.tensors);
  if (fea_disc_) detector::restore_state(*fea_disc_, "fea_disc.", ck.tensors);
}

}  // namespace s2r::uda
