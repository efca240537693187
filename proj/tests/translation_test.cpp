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

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "s2r/data/dataset.hpp"
#include "s2r/detector/checkpoint.hpp"
#include "s2r/errors.hpp"
#include "s2r/translation/export.hpp"
#include "s2r/translation/losses.hpp"
#include "s2r/translation/model.hpp"
#include "support/oracles.hpp"

namespace s2r::translation {
namespace {

namespace fs = std::filesystem;

TranslationConfig toy(Mode mode) {
  TranslationConfig c;
  c.mode = mode;
  c.base_width = 8;
  c.disc_base = 8;
  c.mlp_dim = 32;
  return c;
}

torch::Tensor images(int b, int h = 32, int w = 32, std::uint64_t seed = 0) {
  auto gen = at::detail::createCPUGenerator(seed);
  return torch::rand({b, 3, h, w}, gen) * 2 - 1;
}

class TranslatorTest : public ::testing::TestWithParam<Mode> {};

TEST_P(TranslatorTest, InferenceEncodeIsDeterministic) {
  torch::manual_seed(0);
  Translator t(toy(GetParam()));
  torch::NoGradGuard g;
  const auto x = images(2);
  const auto a = t->encode(x, Domain::kSim, false);
  const auto b = t->encode(x, Domain::kSim, false);
  EXPECT_TRUE(torch::equal(a.content, b.content));
  EXPECT_EQ(a.content.sizes(), (std::vector<int64_t>{2, 32, 8, 8}));
  if (GetParam() == Mode::kMunit) {
    EXPECT_EQ(a.style.sizes(), (std::vector<int64_t>{2, 8}));
  } else {
    EXPECT_FALSE(a.style.defined());
  }
}

TEST_P(TranslatorTest, TrainingNoiseIsUnitGaussian) {
  torch::manual_seed(1);
  Translator t(toy(GetParam()));
  torch::NoGradGuard g;
  const auto x = images(8, 64, 64);  // 8 * 32 * 16 * 16 = 65536 latent entries
  const auto clean = t->encode(x, Domain::kReal, false).content;
  const auto noisy = t->encode(x, Domain::kReal, true).content;
  const auto eta = (noisy - clean).to(torch::kFloat64);
  ASSERT_GE(eta.numel(), 10000);
  EXPECT_NEAR(eta.mean().item<double>(), 0.0, 0.05);
  EXPECT_NEAR(eta.var(false).item<double>(), 1.0, 0.05);
}

TEST_P(TranslatorTest, DecodeShapeAndRange) {
  torch::manual_seed(2);
  Translator t(toy(GetParam()));
  torch::NoGradGuard g;
  const auto x = images(2, 32, 48);
  const auto y = t->decode(t->encode(x, Domain::kSim, false), Domain::kSim);
  EXPECT_EQ(y.sizes(), x.sizes());
  EXPECT_LE(y.max().item<float>(), 1.0f);
  EXPECT_GE(y.min().item<float>(), -1.0f);
}

TEST_P(TranslatorTest, TranslateRules) {
  torch::manual_seed(3);
  Translator t(toy(GetParam()));
  torch::NoGradGuard g;
  const auto x = images(2);
  EXPECT_THROW(t->translate(x, Domain::kSim, Domain::kSim), UsageError);
  const auto a = t->translate(x, Domain::kSim, Domain::kReal, 7);
  const auto b = t->translate(x, Domain::kSim, Domain::kReal, 7);
  EXPECT_EQ(a.sizes(), x.sizes());
  EXPECT_TRUE(torch::equal(a, b));
  // Translating back gives a finite cycle error.
  const auto back = t->translate(a, Domain::kReal, Domain::kSim, 7);
  const double cyc = (back - x).abs().mean().item<double>();
  EXPECT_TRUE(std::isfinite(cyc));
}

TEST_P(TranslatorTest, DiscriminatorsAreMultiScaleAndSeparate) {
  Translator t(toy(GetParam()));
  const auto outs = t->discriminator(Domain::kReal)->forward(images(1, 64, 64));
  ASSERT_EQ(outs.size(), 3u);
  EXPECT_EQ(outs[0].sizes(), (std::vector<int64_t>{1, 1, 8, 8}));
  EXPECT_EQ(outs[2].sizes(), (std::vector<int64_t>{1, 1, 2, 2}));
  const auto codec = t->codec_parameters();
  const auto disc = t->discriminator_parameters();
  EXPECT_EQ(codec.size() + disc.size(), t->parameters().size());
}

INSTANTIATE_TEST_SUITE_P(Modes, TranslatorTest, ::testing::Values(Mode::kUnit, Mode::kMunit),
                         [](const auto& info) { return to_string(info.param); });

TEST(Munit, StylesChangeOutputAndAreRequired) {
  torch::manual_seed(4);
  Translator t(toy(Mode::kMunit));
  torch::NoGradGuard g;
  auto code = t->encode(images(1), Domain::kSim, false);
  auto gen = at::detail::createCPUGenerator(5);
  code.style = t->sample_style(1, gen);
  const auto a = t->decode(code, Domain::kReal);
  code.style = t->sample_style(1, gen);
  const auto b = t->decode(code, Domain::kReal);
  EXPECT_FALSE(torch::equal(a, b));
  code.style = torch::Tensor();
  EXPECT_THROW(t->decode(code, Domain::kReal), UsageError);
}

TEST(Config, JsonRoundTrip) {
  auto c = toy(Mode::kMunit);
  c.style_dim = 5;
  nlohmann::json j = c;
  const auto back = translation_config_from_json(j);
  EXPECT_EQ(back.mode, Mode::kMunit);
  EXPECT_EQ(back.style_dim, 5);
  EXPECT_THROW(mode_from_string("cyclegan"), ConfigError);
}

// ---- LSGAN -----------------------------------------------------------------------

TEST(Lsgan, PerfectAndHalfDiscriminators) {
  const auto ones = torch::ones({4, 1, 3, 3}, torch::kFloat64);
  const auto zeros = torch::zeros({4, 1, 3, 3}, torch::kFloat64);
  auto l = lsgan_losses(ones, zeros);
  EXPECT_NEAR(l.d.item<double>(), 0.0, 1e-15);
  EXPECT_NEAR(l.g.item<double>(), 1.0, 1e-15);
  l = lsgan_losses(ones * 0.5, ones * 0.5);
  EXPECT_NEAR(l.d.item<double>(), 0.5, 1e-15);
  EXPECT_NEAR(l.g.item<double>(), 0.25, 1e-15);
}

TEST(Lsgan, MatchesLoopOracle) {
  auto gen = at::detail::createCPUGenerator(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = torch::randn({2, 1, 3, 4}, gen, torch::kFloat64);
    const auto b = torch::randn({2, 1, 3, 4}, gen, torch::kFloat64);
    const auto va = oracle::to_vec(a), vb = oracle::to_vec(b);
    double d = 0, g = 0, d2 = 0;
    for (double s : va) d += (s - 1) * (s - 1);
    for (double s : vb) d2 += s * s, g += (s - 1) * (s - 1);
    const double n = static_cast<double>(va.size());
    const auto l = lsgan_losses(a, b);
    EXPECT_NEAR(l.d.item<double>(), d / n + d2 / n, 1e-6);
    EXPECT_NEAR(l.g.item<double>(), g / n, 1e-6);
  }
}

TEST(Lsgan, MultiScaleSums) {
  const auto a = torch::full({1, 1, 2, 2}, 0.5), b = torch::zeros({1, 1, 1, 1});
  const auto l = lsgan_losses(std::vector<torch::Tensor>{a, a}, std::vector<torch::Tensor>{b, b});
  EXPECT_NEAR(l.d.item<float>(), 0.5f, 1e-7);
  EXPECT_NEAR(l.g.item<float>(), 2.0f, 1e-7);
  EXPECT_THROW(lsgan_losses(std::vector<torch::Tensor>{a}, std::vector<torch::Tensor>{}),
               ShapeError);
}

// ---- perceptual ---------------------------------------------------------------

TEST(Perceptual, IdentityAndSymmetry) {
  auto net = make_perceptual_net({});
  const auto a = images(1, 32, 32, 1), b = images(1, 32, 32, 2);
  EXPECT_EQ(perceptual_loss(a, a, net).item<float>(), 0.0f);
  EXPECT_EQ(perceptual_loss(a, b, net).item<float>(), perceptual_loss(b, a, net).item<float>());
  EXPECT_GT(perceptual_loss(a, b, net).item<float>(), 0.0f);
  for (const auto& p : net->parameters()) EXPECT_FALSE(p.requires_grad());
}

TEST(Perceptual, RandomFeaturesMatchLoopOracle) {
  auto gen = at::detail::createCPUGenerator(8);
  const int c = 3, h = 4, w = 5;
  for (int trial = 0; trial < 10; ++trial) {
    const auto fa = torch::randn({1, c, h, w}, gen, torch::kFloat64);
    const auto fb = torch::randn({1, c, h, w}, gen, torch::kFloat64) * 2 + 1;
    const auto na = oracle::instance_norm(oracle::to_vec(fa), c, h * w);
    const auto nb = oracle::instance_norm(oracle::to_vec(fb), c, h * w);
    double mse = 0;
    for (std::size_t i = 0; i < na.size(); ++i) mse += (na[i] - nb[i]) * (na[i] - nb[i]);
    EXPECT_NEAR(perceptual_distance(fa, fb).item<double>(), mse / na.size(), 1e-5);
  }
}

TEST(Perceptual, WeightsFile) {
  PerceptualConfig cfg;
  cfg.weights = "/nonexistent/vgg16.ckpt";
  EXPECT_THROW(make_perceptual_net(cfg), ConfigError);

  const auto dir = fs::temp_directory_path() / "s2r_vgg";
  fs::create_directories(dir);
  PerceptualConfig other;
  other.seed = 99;
  auto src = make_perceptual_net(other);
  detector::Checkpoint ck;
  detector::collect_state(*src, "", ck.tensors);
  detector::save_checkpoint(dir / "vgg.ckpt", ck);
  cfg.weights = dir / "vgg.ckpt";
  auto loaded = make_perceptual_net(cfg);
  const auto x = images(1);
  EXPECT_TRUE(torch::equal(loaded->forward(x), src->forward(x)));

  ck.tensors.erase(ck.tensors.begin());
  detector::save_checkpoint(dir / "broken.ckpt", ck);
  cfg.weights = dir / "broken.ckpt";
  EXPECT_THROW(make_perceptual_net(cfg), ConfigError);
}

// ---- reconstruction ------------------------------------------------------------

class StubCodec : public DomainCodec {
 public:
  StubCodec(Mode mode, double gain) : mode_(mode), gain_(gain) {}
  Mode codec_mode() const override { return mode_; }
  LatentCode encode(const torch::Tensor& x, Domain, bool) override {
    LatentCode c{x, {}};
    if (mode_ == Mode::kMunit) c.style = torch::zeros({x.size(0), 2}, x.options());
    return c;
  }
  torch::Tensor decode(const LatentCode& code, Domain) override { return code.content * gain_; }
  torch::Tensor sample_style(int64_t b, torch::Generator&) override {
    return torch::zeros({b, 2});
  }

 private:
  Mode mode_;
  double gain_;
};

TEST(Reconstruction, IdentityStubIsZeroInBothModes) {
  for (Mode m : {Mode::kUnit, Mode::kMunit}) {
    StubCodec id(m, 1.0);
    const auto l = reconstruction_losses(id, images(2, 8, 8, 1), images(2, 8, 8, 2));
    EXPECT_EQ(l.recon.item<float>(), 0.0f);
    EXPECT_EQ(l.cyc_recon.item<float>(), 0.0f);
    if (m == Mode::kMunit) {
      EXPECT_EQ(l.recon_c.item<float>(), 0.0f);
      EXPECT_EQ(l.recon_s.item<float>(), 0.0f);
    } else {
      EXPECT_FALSE(l.recon_c.defined());
    }
  }
}

TEST(Reconstruction, ZeroGeneratorGivesTwiceMeanAbs) {
  StubCodec zero(Mode::kUnit, 0.0);
  const auto xs = images(3, 8, 8, 3), xr = images(3, 8, 8, 4);
  // Scale the real batch so both domains share the same mean |x|.
  const auto m = xs.abs().mean();
  const auto xr_scaled = xr * (m / xr.abs().mean());
  const auto l = reconstruction_losses(zero, xs, xr_scaled);
  EXPECT_NEAR(l.recon.item<float>(), 2 * m.item<float>(), 1e-6);
}

TEST(Reconstruction, MatchesLoopOracle) {
  StubCodec half(Mode::kUnit, 0.5);
  const auto xs = images(2, 4, 4, 5).to(torch::kFloat64), xr = images(2, 4, 4, 6).to(torch::kFloat64);
  const auto l = reconstruction_losses(half, xs, xr);
  auto l1 = [](const std::vector<double>& v, double gain) {
    double s = 0;
    for (double x : v) s += std::abs(x - gain * x);
    return s / v.size();
  };
  const auto vs = oracle::to_vec(xs), vr = oracle::to_vec(xr);
  EXPECT_NEAR(l.recon.item<double>(), l1(vs, 0.5) + l1(vr, 0.5), 1e-6);
  EXPECT_NEAR(l.cyc_recon.item<double>(), l1(vs, 0.25) + l1(vr, 0.25), 1e-6);
}

// ---- gradients -------------------------------------------------------------------

TEST(Gradients, MatchFiniteDifferences) {
  auto gen = at::detail::createCPUGenerator(9);
  const auto fixed = torch::randn({1, 1, 3, 3}, gen, torch::kFloat64);
  const auto scores = torch::randn({1, 1, 3, 3}, gen, torch::kFloat64);
  EXPECT_LT(oracle::max_grad_rel_error(
                [&](const torch::Tensor& x) { return lsgan_losses(fixed, x).d; }, scores), 1e-4);
  EXPECT_LT(oracle::max_grad_rel_error(
                [&](const torch::Tensor& x) { return lsgan_losses(fixed, x).g; }, scores), 1e-4);
  const auto fb = torch::randn({1, 2, 3, 3}, gen, torch::kFloat64);
  EXPECT_LT(oracle::max_grad_rel_error(
                [&](const torch::Tensor& x) { return perceptual_distance(x, fb); },
                torch::randn({1, 2, 3, 3}, gen, torch::kFloat64)),
            1e-4);
  StubCodec half(Mode::kUnit, 0.5);
  const auto xr = torch::randn({1, 3, 2, 2}, gen, torch::kFloat64);
  EXPECT_LT(oracle::max_grad_rel_error(
                [&](const torch::Tensor& x) {
                  const auto l = reconstruction_losses(half, x, xr);
                  return l.recon + l.cyc_recon;
                },
                torch::randn({1, 3, 2, 2}, gen, torch::kFloat64)),
            1e-4);
}

// ---- export ----------------------------------------------------------------------

TEST(Export, WritesLoadableTranslatedDataset) {
  torch::manual_seed(10);
  Translator t(toy(Mode::kUnit));
  data::Dataset ds;
  ds.domain = Domain::kSim;
  ds.mapping = std::make_shared<lane::LaneClassMapping>(lane::LaneClassMapping::simulanes_default());
  for (int i = 0; i < 3; ++i) {
    data::FrameSample s;
    s.image = cv::Mat(90, 160, CV_8UC3, cv::Scalar(20 * i, 50, 90));
    lane::LanePointLabel l;
    l.h_samples = {40, 60, 80};
    l.lanes.push_back({{10.0 + i, 20.0, lane::kAbsent}, 2});
    s.label = l;
    ds.samples.push_back(s);
  }
  ExportOptions opt;
  opt.output_dir = fs::temp_directory_path() / "s2r_export";
  fs::remove_all(opt.output_dir);
  opt.model_size = {32, 64};
  opt.batch_size = 2;
  const auto manifest = export_translated(t, ds, Domain::kReal, opt);
  const auto back = data::load_dataset(data::load_manifest(manifest, data::Split::kTrain),
                                       Domain::kSim, {.require_labels = true});
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back.samples[2].image.size(), ds.samples[2].image.size());
  EXPECT_EQ(back.samples[2].label->lanes[0].xs, ds.samples[2].label->lanes[0].xs);
  EXPECT_THROW(export_translated(t, ds, Domain::kSim, opt), UsageError);
}

}  // namespace
}  // namespace s2r::translation
