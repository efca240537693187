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

// Acceptance runner: one PASS/FAIL line per criterion, with the sub-checks
// listed underneath. Tolerances and time budgets are fixed here.
//
//   acceptance [--only <name>] [--scratch <dir>]
//
// Exit status is 0 when every red criterion is listed in kKnownRed (those
// stay red in the output; see the README), 1 otherwise.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>
#include <torch/torch.h>

#include "s2r/detector/losses.hpp"
#include "s2r/errors.hpp"
#include "s2r/harness/experiment.hpp"
#include "s2r/lane/metrics.hpp"
#include "s2r/simulanes/camera.hpp"
#include "s2r/simulanes/generator.hpp"
#include "s2r/simulanes/geometry.hpp"
#include "s2r/simulanes/procedural.hpp"
#include "s2r/simulanes/scheduling.hpp"
#include "s2r/lane/tusimple_io.hpp"
#include "s2r/translation/losses.hpp"
#include "s2r/uda/objectives.hpp"
#include "s2r/uda/train.hpp"
#include "s2r/uda/trainer.hpp"
#include "support/crafted_clip.hpp"
#include "support/oracles.hpp"
#include "support/road_oracle.hpp"
#include "support/toy_data.hpp"

namespace {

using namespace s2r;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// ---- tolerances and budgets ----
constexpr double kOracleTol = 1e-6;
constexpr int kOracleInstances = 100;
constexpr double kGradTol = 1e-4;
constexpr double kGeomOffsetTol = 1e-6;  // m
constexpr double kProjectionTol = 1e-6;  // px
constexpr double kLabelTol = 0.5;        // px
constexpr double kOverfitTarget = 0.99;
constexpr int kOverfitSteps = 500;
constexpr double kAdaMinDrop = 0.1;
constexpr double kReconMinDrop = 0.5;
constexpr int kTranslationSteps = 300;
constexpr double kLrTol = 1e-9;
constexpr double kStddevTol = 1e-3;

// Criteria that cannot be met as stated; analysis in the README.
const std::set<std::string> kKnownRed = {"smoke-training"};

fs::path g_scratch;

// Collects sub-check results for one criterion.
class Report {
 public:
  void check(bool ok, const std::string& what) {
    lines_.push_back({ok, what});
    all_ &= ok;
  }
  void note(const std::string& what) { notes_.push_back(what); }
  bool ok() const { return all_; }
  void print() const {
    for (const auto& [ok, what] : lines_) std::cout << "    " << (ok ? "ok   " : "FAIL ") << what << '\n';
    for (const auto& n : notes_) std::cout << "    info " << n << '\n';
  }

 private:
  std::vector<std::pair<bool, std::string>> lines_;
  std::vector<std::string> notes_;
  bool all_ = true;
};

double secs_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string budget_line(const char* what, double s, double budget) {
  return fmt::format("{} runtime {:.1f} s < {:.0f} s", what, s, budget);
}

fs::path scratch(const std::string& name) {
  auto p = g_scratch / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------------------
// loss oracles

double lsgan_d_oracle(const std::vector<double>& real, const std::vector<double>& fake) {
  double a = 0, b = 0;
  for (double v : real) a += (v - 1) * (v - 1);
  for (double v : fake) b += v * v;
  return a / real.size() + b / fake.size();
}

double lsgan_g_oracle(const std::vector<double>& fake) {
  double b = 0;
  for (double v : fake) b += (v - 1) * (v - 1);
  return b / fake.size();
}

double l1_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / a.size();
}

void loss_oracles(Report& r) {
  const auto t0 = Clock::now();
  auto gen = at::detail::createCPUGenerator(2024);
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(2, 5);
  const auto f64 = torch::kFloat64;
  double worst_task = 0, worst_gan = 0, worst_l1 = 0, worst_adv = 0, worst_total = 0;
  for (int it = 0; it < kOracleInstances; ++it) {
    const int c = dim(rng), h = dim(rng), w = dim(rng), k = c + 1, hh = dim(rng) + 2, ww = dim(rng) + 2;
    const auto loc = torch::randn({1, c, h, w + 1}, gen, f64) * 2;
    const auto lt = torch::randint(0, w + 1, {1, c, h}, gen, torch::kInt64);
    const auto seg = torch::randn({1, k, hh, ww}, gen, f64);
    const auto st = torch::randint(0, k, {1, hh, ww}, gen, torch::kInt64);
    const auto cl = torch::randn({1, c, 2}, gen, f64);
    const auto ct = torch::randint(0, 2, {1, c}, gen, torch::kInt64);
    const auto cm = torch::randint(0, 2, {1, c}, gen, torch::kInt64).to(torch::kBool);

    const auto lz = oracle::to_vec(loc);
    const auto lti = oracle::to_ivec(lt);
    const double o_loc = oracle::loc_loss(lz, lti, c, h, w + 1);
    const double o_sim = oracle::sim_loss(lz, c, h, w + 1);
    const double o_seg = oracle::seg_loss(oracle::to_vec(seg), oracle::to_ivec(st), k, hh, ww);
    std::vector<bool> mask;
    for (auto v : oracle::to_ivec(cm)) mask.push_back(v != 0);
    const double o_cls = oracle::cls_loss(oracle::to_vec(cl), oracle::to_ivec(ct), mask, c, 2);
    worst_task = std::max({worst_task, rel(detector::loc_loss(loc, lt).item<double>(), o_loc),
                           rel(detector::sim_loss(loc).item<double>(), o_sim),
                           rel(detector::seg_loss(seg, st).item<double>(), o_seg),
                           rel(detector::cls_loss(cl, ct, cm).item<double>(), o_cls)});
    detector::DetectorOutput out{loc, cl, seg, {}};
    detector::TargetBatch tb{lt, ct, cm, st};
    const detector::TaskLossWeights tw{1.0, 1.0, 0.1};
    worst_task = std::max(worst_task, rel(detector::task_loss(out, tb, tw).total.item<double>(),
                                          o_loc + o_sim + o_seg + 0.1 * o_cls));

    // LSGAN, single and multi-scale
    std::vector<torch::Tensor> dr, dg;
    double o_d = 0, o_g = 0;
    for (int s = 0; s < 3; ++s) {
      const int side = 8 >> s;
      dr.push_back(torch::randn({2, 1, side, side}, gen, f64));
      dg.push_back(torch::randn({2, 1, side, side}, gen, f64));
      o_d += lsgan_d_oracle(oracle::to_vec(dr.back()), oracle::to_vec(dg.back()));
      o_g += lsgan_g_oracle(oracle::to_vec(dg.back()));
    }
    const auto single = translation::lsgan_losses(dr[0], dg[0]);
    const auto multi = translation::lsgan_losses(dr, dg);
    worst_gan = std::max({worst_gan,
                          rel(single.d.item<double>(), lsgan_d_oracle(oracle::to_vec(dr[0]), oracle::to_vec(dg[0]))),
                          rel(single.g.item<double>(), lsgan_g_oracle(oracle::to_vec(dg[0]))),
                          rel(multi.d.item<double>(), o_d), rel(multi.g.item<double>(), o_g)});

    // reconstruction / cyclic / content / style L1 terms on a hand-built pass
    translation::GenerativePass p;
    auto img = [&] { return torch::randn({2, 3, hh, ww}, gen, f64); };
    auto code = [&] { return translation::LatentCode{torch::randn({2, 4, 2, 2}, gen, f64),
                                                     torch::randn({2, 8}, gen, f64)}; };
    const auto xs = img(), xr = img();
    p.x_ss = img(), p.x_rr = img(), p.x_srs = img(), p.x_rsr = img();
    p.c_sim = code(), p.c_real = code(), p.c_sr = code(), p.c_rs = code();
    p.style_r = torch::randn({2, 8}, gen, f64), p.style_s = torch::randn({2, 8}, gen, f64);
    const auto l = translation::reconstruction_losses(p, xs, xr, translation::Mode::kMunit);
    using oracle::to_vec;
    worst_l1 = std::max(
        {worst_l1,
         rel(l.recon.item<double>(), l1_oracle(to_vec(xs), to_vec(p.x_ss)) + l1_oracle(to_vec(xr), to_vec(p.x_rr))),
         rel(l.cyc_recon.item<double>(),
             l1_oracle(to_vec(xs), to_vec(p.x_srs)) + l1_oracle(to_vec(xr), to_vec(p.x_rsr))),
         rel(l.recon_c.item<double>(), l1_oracle(to_vec(p.c_sr.content), to_vec(p.c_sim.content)) +
                                           l1_oracle(to_vec(p.c_rs.content), to_vec(p.c_real.content))),
         rel(l.recon_s.item<double>(), l1_oracle(to_vec(p.c_sr.style), to_vec(p.style_r)) +
                                           l1_oracle(to_vec(p.c_rs.style), to_vec(p.style_s)))});

    // feature-adversarial pair
    const int b = dim(rng) + 2;
    const auto sr = torch::rand({b}, gen, f64) * 0.98 + 0.01;
    const auto ss = torch::rand({b + 1}, gen, f64) * 0.98 + 0.01;
    double od = 0, og = 0, a1 = 0, a2 = 0;
    for (double v : to_vec(sr)) a1 += std::log(1 - v), a2 += std::log(v);
    od += a1 / b, og += a2 / b;
    a1 = a2 = 0;
    for (double v : to_vec(ss)) a1 += std::log(v), a2 += std::log(1 - v);
    od += a1 / (b + 1), og += a2 / (b + 1);
    const auto adv = uda::adv_fea_losses(sr, ss);
    worst_adv = std::max({worst_adv, rel(adv.d.item<double>(), od), rel(adv.g.item<double>(), og)});

    // totals: UNIT (no feature disc), MUNIT, and with the feature discriminator
    std::uniform_real_distribution<double> u(0.0, 3.0);
    uda::GenLossWeights gw{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    uda::GenComponents<double> gc{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    const double unit = gw.l0 * *gc.recon + gw.l1 * *gc.cyc_recon + gw.l2 * *gc.lsgan_g +
                        gw.l3 * *gc.task + gw.l4 * *gc.cyc_task + gw.l5 * *gc.vgg;
    const double munit = unit + gw.lc * *gc.recon_c + gw.ls * *gc.recon_s;
    using translation::Mode;
    worst_total = std::max({worst_total, rel(uda::total_generative_loss(gc, gw, Mode::kUnit, false), unit),
                            rel(uda::total_generative_loss(gc, gw, Mode::kMunit, false), munit),
                            rel(uda::total_generative_loss(gc, gw, Mode::kUnit, true), unit + gw.l6 * *gc.adv_fea_g),
                            rel(uda::total_generative_loss(gc, gw, Mode::kMunit, true), munit + gw.l6 * *gc.adv_fea_g)});
  }
  const double s = secs_since(t0);
  r.check(worst_task < kOracleTol, fmt::format("loc/sim/seg/cls/task vs loops: max rel err {:.2e} over {} instances", worst_task, kOracleInstances));
  r.check(worst_gan < kOracleTol, fmt::format("LSGAN pair (1 and 3 scales): max rel err {:.2e}", worst_gan));
  r.check(worst_l1 < kOracleTol, fmt::format("recon/cyc/content/style L1: max rel err {:.2e}", worst_l1));
  r.check(worst_adv < kOracleTol, fmt::format("feature-adversarial pair: max rel err {:.2e}", worst_adv));
  r.check(worst_total < kOracleTol, fmt::format("UNIT/MUNIT/+feature-disc totals: max rel err {:.2e}", worst_total));
  r.check(s < 60.0, budget_line("suite", s, 60.0));
}

// ---------------------------------------------------------------------------
// gradients

void gradients(Report& r) {
  const auto t0 = Clock::now();
  auto gen = at::detail::createCPUGenerator(77);
  const auto f64 = torch::kFloat64;
  constexpr int c = 2, h = 3, w = 4;
  std::vector<std::pair<std::string, double>> errs;
  auto grad = [&](const std::string& name, const std::function<torch::Tensor(const torch::Tensor&)>& f,
                  const torch::Tensor& x) { errs.emplace_back(name, oracle::max_grad_rel_error(f, x)); };

  const auto lt = torch::randint(0, w + 1, {1, c, h}, gen, torch::kInt64);
  const auto z = torch::randn({1, c, h, w + 1}, gen, f64);
  grad("loc", [&](const torch::Tensor& x) { return detector::loc_loss(x, lt); }, z);
  grad("sim", [](const torch::Tensor& x) { return detector::sim_loss(x); }, z);
  const auto st = torch::randint(0, c + 1, {1, 16, 16}, gen, torch::kInt64);
  grad("seg", [&](const torch::Tensor& x) { return detector::seg_loss(x, st); },
       torch::randn({1, c + 1, 16, 16}, gen, f64));
  const auto ct = torch::randint(0, 2, {1, c}, gen, torch::kInt64);
  const auto cm = torch::ones({1, c}, torch::kBool);
  grad("cls", [&](const torch::Tensor& x) { return detector::cls_loss(x, ct, cm); },
       torch::randn({1, c, 2}, gen, f64));

  const auto d_real = torch::randn({1, 1, 16, 16}, gen, f64);
  const auto d_fake = torch::randn({1, 1, 16, 16}, gen, f64);
  grad("lsgan_d", [&](const torch::Tensor& x) { return translation::lsgan_losses(x, d_fake).d; }, d_real);
  grad("lsgan_g", [&](const torch::Tensor& x) { return translation::lsgan_losses(d_real, x).g; }, d_fake);

  // image-space terms on 16x16 images
  const auto xs = torch::randn({1, 3, 16, 16}, gen, f64);
  const auto other = torch::randn({1, 3, 16, 16}, gen, f64);
  auto pass_of = [&](const torch::Tensor& x) {
    translation::GenerativePass p;
    p.x_ss = x * 0.5;
    p.x_rr = other * 0.5;
    p.x_srs = x.flip({3}) * 0.25 + 0.1;
    p.x_rsr = other;
    return p;
  };
  grad("recon", [&](const torch::Tensor& x) {
    return translation::reconstruction_losses(pass_of(x), xs, other, translation::Mode::kUnit).recon;
  }, torch::randn({1, 3, 16, 16}, gen, f64));
  grad("cyc_recon", [&](const torch::Tensor& x) {
    return translation::reconstruction_losses(pass_of(x), xs, other, translation::Mode::kUnit).cyc_recon;
  }, torch::randn({1, 3, 16, 16}, gen, f64));
  auto code_pass = [&](const torch::Tensor& content, const torch::Tensor& style) {
    translation::GenerativePass p = pass_of(xs);
    p.c_sim = {content.detach() * 0 + 0.3, style.detach() * 0 - 0.2};
    p.c_real = {torch::zeros_like(content), torch::zeros_like(style)};
    p.c_sr = {content, style};
    p.c_rs = {content * 2, style * 2};
    p.style_r = torch::full_like(style, 0.7);
    p.style_s = torch::full_like(style, -0.4);
    return p;
  };
  const auto cz = torch::randn({1, 4, 4, 4}, gen, f64);
  const auto sz = torch::randn({1, 8}, gen, f64);
  grad("recon_c", [&](const torch::Tensor& x) {
    return translation::reconstruction_losses(code_pass(x, sz), xs, other, translation::Mode::kMunit).recon_c;
  }, cz);
  grad("recon_s", [&](const torch::Tensor& x) {
    return translation::reconstruction_losses(code_pass(cz, x), xs, other, translation::Mode::kMunit).recon_s;
  }, sz);

  translation::PerceptualConfig pc;
  auto net = translation::make_perceptual_net(pc);
  net->to(f64);
  grad("vgg", [&](const torch::Tensor& x) { return translation::perceptual_loss(x, other, net); },
       torch::randn({1, 3, 16, 16}, gen, f64));

  const auto scores_sim = torch::rand({6}, gen, f64) * 0.9 + 0.05;
  grad("adv_fea_d", [&](const torch::Tensor& x) { return uda::adv_fea_losses(torch::sigmoid(x), scores_sim).d_min(); },
       torch::randn({6}, gen, f64));
  grad("adv_fea_g", [&](const torch::Tensor& x) { return uda::adv_fea_losses(torch::sigmoid(x), scores_sim).g_min(); },
       torch::randn({6}, gen, f64));

  grad("total", [&](const torch::Tensor& x) {
    uda::GenComponents<torch::Tensor> g;
    const auto l = translation::reconstruction_losses(pass_of(x), xs, other, translation::Mode::kUnit);
    g.recon = l.recon;
    g.cyc_recon = l.cyc_recon;
    g.lsgan_g = translation::lsgan_losses(d_real, x.mean({1}, true)).g;
    g.task = detector::seg_loss(x, st.clamp_max(2));
    g.cyc_task = g.task;
    g.vgg = translation::perceptual_loss(x, other, net);
    g.adv_fea_g = uda::adv_fea_losses(torch::sigmoid(x.mean({1, 2, 3})), scores_sim).g_min();
    return uda::total_generative_loss(g, uda::GenLossWeights{}, translation::Mode::kUnit, true);
  }, torch::randn({1, 3, 16, 16}, gen, f64));

  double worst = 0;
  std::string names;
  for (const auto& [n, e] : errs) {
    worst = std::max(worst, e);
    if (e >= kGradTol) names += " " + n;
  }
  const double s = secs_since(t0);
  r.check(worst < kGradTol, fmt::format("{} losses vs central differences: max rel err {:.2e}{}", errs.size(),
                                        worst, names.empty() ? "" : " (over:" + names + ")"));
  r.check(s < 120.0, budget_line("suite", s, 120.0));
}

// ---------------------------------------------------------------------------
// metric

void metric(Report& r) {
  const auto clip = oracle::crafted_clip();
  lane::MetricAccumulator acc(20.0);
  for (std::size_t k = 0; k < clip.gts.size(); ++k) acc.add(clip.preds[k], clip.gts[k]);
  r.check(acc.correct() == 6 && acc.total() == 12 && acc.accuracy() == 0.5,
          fmt::format("crafted 3-frame clip: {}/{} = {} (hand count 6/12 = 0.5)", acc.correct(), acc.total(),
                      acc.accuracy()));
  const double perfect = lane::tusimple_accuracy(clip.gts, clip.gts);
  r.check(perfect == 1.0, fmt::format("perfect prediction -> {}", perfect));
  auto empty = clip.gts;
  for (auto& f : empty)
    for (auto& l : f.lanes) std::fill(l.xs.begin(), l.xs.end(), lane::kAbsent);
  const double none = lane::tusimple_accuracy(empty, clip.gts);
  r.check(none == 0.0, fmt::format("empty prediction -> {}", none));
}

// ---------------------------------------------------------------------------
// geometry

void geometry(Report& r) {
  using simulanes::Point3;
  constexpr double pi = std::numbers::pi;
  double worst = 0;
  {
    const double w = 3.5;
    std::vector<Point3> pts;
    for (int k = 0; k < 20; ++k) pts.emplace_back(3.0 + 0.3 * k, 2.0 * k, 0.0);
    const auto b = simulanes::lane_boundaries_from_waypoints(pts, w);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      worst = std::max({worst, std::abs((b.left[k] - pts[k]).norm() - w / 2),
                        std::abs((b.right[k] - pts[k]).norm() - w / 2)});
    }
  }
  {
    const double rad = 40.0, w = 3.2;
    std::vector<Point3> pts;
    std::vector<double> headings;
    for (int k = 0; k <= 60; ++k) {
      const double th = 0.02 * k;
      pts.emplace_back(rad * std::cos(th), rad * std::sin(th), 0.0);
      headings.push_back(th + pi / 2);
    }
    const auto b = simulanes::lane_boundaries_from_waypoints(pts, w, headings);
    const auto est = simulanes::lane_boundaries_from_waypoints(pts, w);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      worst = std::max({worst, std::abs(b.left[k].head<2>().norm() - (rad - w / 2)),
                        std::abs(b.right[k].head<2>().norm() - (rad + w / 2))});
      if (k > 0 && k + 1 < pts.size()) {
        worst = std::max({worst, std::abs(est.left[k].head<2>().norm() - (rad - w / 2)),
                          std::abs(est.right[k].head<2>().norm() - (rad + w / 2))});
      }
    }
  }
  r.check(worst < kGeomOffsetTol, fmt::format("boundary offset W/2 (straight + circular): max err {:.2e} m", worst));

  // pinhole: camera at height hc looking along +x, no pitch
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> fwd(1.0, 80.0), lat(-20.0, 20.0), up(-3.0, 3.0);
  simulanes::Camera cam;
  cam.intrinsics = simulanes::PinholeIntrinsics::from_fov(1280, 720, 70.0);
  const double hc = 1.5;
  cam.pose.position = Point3(0, 0, hc);
  const auto& k = cam.intrinsics;
  double worst_px = 0;
  int n = 0;
  for (int i = 0; i < 1000; ++i) {
    const Point3 p(fwd(rng), lat(rng), up(rng));
    const auto uv = cam.project(p);
    if (!uv) continue;
    ++n;
    worst_px = std::max({worst_px, std::abs(uv->x() - (k.cx - k.fx * p.y() / p.x())),
                         std::abs(uv->y() - (k.cy + k.fy * (hc - p.z()) / p.x()))});
  }
  r.check(n == 1000 && worst_px < kProjectionTol,
          fmt::format("pinhole projection of {} random points: max err {:.2e} px", n, worst_px));

  // procedural labels re-derived by bisection
  const auto classes = lane::LaneClassMapping::simulanes_default();
  simulanes::ProceduralOptions opt;
  opt.intrinsics = simulanes::PinholeIntrinsics::from_fov(640, 360, 70.0);
  simulanes::ProceduralBackend backend(opt, classes);
  simulanes::GenerationRequest req;
  req.total_frames = 12;
  req.maps = {"Town01", "Town03", "Town04", "Town05", "Town07", "Town10HD"};
  req.seed = 21;
  req.output_dir = scratch("geometry");
  simulanes::generate_dataset(backend, req, classes);
  const auto records = lane::read_label_file(req.output_dir / "labels_train.txt");
  std::ifstream meta_in(req.output_dir / "generation.json");
  const auto intr = nlohmann::json::parse(meta_in).at("intrinsics").get<simulanes::PinholeIntrinsics>();
  std::ifstream scenes(req.output_dir / "scenes.jsonl");
  std::string line;
  double worst_label = 0;
  int compared = 0;
  for (const auto& rec : records) {
    std::getline(scenes, line);
    const auto scene = nlohmann::json::parse(line);
    const auto road = simulanes::ProceduralRoad::make(scene.at("map").get<std::string>(),
                                                      scene.at("map_seed").get<std::uint64_t>(), classes);
    simulanes::Camera c;
    c.intrinsics = intr;
    c.pose = scene.at("camera").get<simulanes::CameraPose>();
    const int ego = scene.at("lane").get<int>();
    const double s_ego = scene.at("s").get<double>();
    for (int slot = 0; slot < 4; ++slot) {
      const int b = ego - 1 + slot;
      if (b < 0 || b > road.num_lanes()) continue;
      const auto& lane = rec.label->lanes[slot];
      for (std::size_t a = 0; a < rec.label->h_samples.size(); ++a) {
        const auto want = oracle::procedural_x(road, c, b, s_ego, rec.label->h_samples[a]);
        if (want && lane.xs[a] != lane::kAbsent) {
          worst_label = std::max(worst_label, std::abs(lane.xs[a] - *want));
          ++compared;
        }
      }
    }
  }
  r.check(compared > 200 && worst_label < kLabelTol,
          fmt::format("procedural labels vs analytic re-derivation: {} points, max err {:.3f} px", compared,
                      worst_label));
}

// ---------------------------------------------------------------------------
// smoke training

uda::StrategyConfig toy_config(uda::Strategy s) {
  uda::StrategyConfig c;
  c.strategy = s;
  c.detector.anchors = toy::anchors();
  c.augmentation = data::AugmentationParams::none();
  c.seeds = {0};
  return c;
}

// Best training accuracy seen within kOverfitSteps single-batch steps.
std::pair<double, int> overfit(const toy::Domains& d, double alpha, const fs::path& dir) {
  auto c = toy_config(uda::Strategy::kDirect);
  c.max_epochs = kOverfitSteps;  // 8 frames, batch 8: one step per epoch
  c.eval_every = 10;
  c.log_train_accuracy = true;
  c.task_weights.alpha = alpha;
  double best = 0;
  int first_hit = -1;
  uda::train_seed(c, {d.sim, d.real, d.sim, {}}, 0, dir, [&](const uda::EpochRecord& rec) {
    if (!rec.train_acc) return;
    best = std::max(best, *rec.train_acc);
    if (first_hit < 0 && *rec.train_acc >= kOverfitTarget) first_hit = rec.epoch;
  });
  return {best, first_hit};
}

bool smoke_direct(Report& r) {
  const auto t0 = Clock::now();
  const auto root = scratch("smoke_direct");
  const auto d = toy::make_domains(root / "data", 8, 8, 4);
  const auto [best, hit] = overfit(d, uda::StrategyConfig{}.task_weights.alpha, root / "run");
  const double s = secs_since(t0);
  const bool ok = best >= kOverfitTarget && s < 600.0;
  r.check(ok, fmt::format("direct, default task weights: best train row-anchor acc {:.4f} in {} steps "
                          "(need >= {}), {:.1f} s / 600 s", best, kOverfitSteps, kOverfitTarget, s));
  const auto [best0, hit0] = overfit(d, 0.0, root / "run_alpha0");
  r.note(fmt::format("direct with sim-loss weight 0: best acc {:.4f}, >= {} first at step {}", best0,
                     kOverfitTarget, hit0));
  return ok;
}

bool smoke_ada(Report& r) {
  const auto t0 = Clock::now();
  const auto root = scratch("smoke_ada");
  const auto d = toy::make_domains(root / "data", 64, 64, 64);
  auto c = toy_config(uda::Strategy::kAda);
  c.augmentation = data::AugmentationParams{};
  c.augmentation.shift_x_px = 12;
  c.augmentation.shift_y_px = 4;
  c.max_epochs = 16;
  c.eval_every = 1;
  double early = 0, late = 0;
  const std::vector<std::uint64_t> seeds{0, 1, 2};
  for (auto seed : seeds) {
    std::vector<double> dist;
    uda::train_seed(c, {d.sim, d.real, d.real_val, d.sim_heldout}, seed, root / fmt::format("seed_{}", seed),
                    [&](const uda::EpochRecord& rec) { dist.push_back(std::abs(*rec.fea_disc_acc - 0.5)); });
    const auto n = dist.size();
    early += (dist[0] + dist[1] + dist[2]) / 3 / seeds.size();
    late += (dist[n - 1] + dist[n - 2] + dist[n - 3]) / 3 / seeds.size();
  }
  const double s = secs_since(t0);
  const bool ok = early - late >= kAdaMinDrop && s < 1200.0;
  r.check(ok, fmt::format("ada: held-out |D_fea acc - 0.5| early {:.3f} -> late {:.3f}, drop {:.3f} "
                          "(need >= {}), {:.1f} s / 1200 s", early, late, early - late, kAdaMinDrop, s));
  return ok;
}

bool smoke_translation(Report& r, translation::Mode mode) {
  const auto t0 = Clock::now();
  const auto root = scratch(fmt::format("smoke_{}", translation::to_string(mode)));
  const auto d = toy::make_domains(root / "data", 8, 8, 4);
  auto c = toy_config(mode == translation::Mode::kUnit ? uda::Strategy::kTwoStageUnit
                                                       : uda::Strategy::kTwoStageMunit);
  c.detector.anchors = lane::RowAnchorConfig::evenly_spaced(4, 25, 24, 5, 8, {64, 64}, {90, 160});
  c.warmup_epochs = 0;
  uda::Trainer t(c, uda::Loop::kTranslation, 0);
  data::UnpairedBatchStream stream(d.sim.size(), d.real.size(), 4, 0);
  double first = 0, last = 0;
  const int per_epoch = static_cast<int>(stream.steps_per_epoch());
  for (int step = 0; step < kTranslationSteps; ++step) {
    const auto st = stream.epoch(step / per_epoch)[step % per_epoch];
    const auto b = uda::make_batch(data::gather(st, d.sim, d.real), c, nullptr, false, true, step);
    t.schedule(step, kTranslationSteps, 0);
    auto l = t.step(b);
    if (step < 10) first += l["recon"] / 10;
    if (step >= kTranslationSteps - 10) last += l["recon"] / 10;
  }
  const double s = secs_since(t0);
  const double drop = 1.0 - last / first;
  const bool ok = drop >= kReconMinDrop && s < 1200.0;
  r.check(ok, fmt::format("{} 64x64: recon loss (mean of first/last 10 steps) {:.4f} -> {:.4f}, drop {:.1f}% "
                          "(need >= {:.0f}%), {:.1f} s / 1200 s", translation::to_string(mode), first, last,
                          100 * drop, 100 * kReconMinDrop, s));
  return ok;
}

void smoke(Report& r) {
  smoke_direct(r);
  smoke_ada(r);
  smoke_translation(r, translation::Mode::kUnit);
  smoke_translation(r, translation::Mode::kMunit);
}

// ---------------------------------------------------------------------------
// equivalence

void equivalence(Report& r) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  bool exact = true;
  for (int i = 0; i < 200; ++i) {
    uda::GenLossWeights w;
    w.l6 = 0.0;
    uda::GenComponents<double> c{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    for (auto mode : {translation::Mode::kUnit, translation::Mode::kMunit}) {
      exact &= uda::total_generative_loss(c, w, mode, true) == uda::total_generative_loss(c, w, mode, false);
    }
    uda::GenComponents<torch::Tensor> t;
    for (auto* f : {&t.recon, &t.cyc_recon, &t.lsgan_g, &t.task, &t.cyc_task, &t.vgg, &t.adv_fea_g}) {
      *f = torch::tensor(u(rng), torch::kFloat64);
    }
    exact &= torch::equal(uda::total_generative_loss(t, w, translation::Mode::kUnit, true),
                          uda::total_generative_loss(t, w, translation::Mode::kUnit, false));
  }
  r.check(exact, "with-feature-disc total at lambda6 = 0 equals the plain total bitwise (200 double + 200 tensor cases)");

  uda::GenComponents<double> ones{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  const double sum = uda::total_generative_loss(ones, uda::GenLossWeights{}, translation::Mode::kUnit, false);
  r.check(sum == 24.0, fmt::format("default weights on unit components: {} (expect 24)", sum));

  const uda::LrSchedule sched{4e-4, 25, 100};
  const double a = uda::lr_at(0, sched), b = uda::lr_at(25, sched), c = uda::lr_at(100, sched);
  r.check(std::abs(a) < kLrTol && std::abs(b - 4e-4) < kLrTol && std::abs(c) < kLrTol,
          fmt::format("lr schedule: step 0 -> {:.3e}, warmup end -> {:.3e}, horizon -> {:.3e}", a, b, c));
}

// ---------------------------------------------------------------------------
// harness

void harness_checks(Report& r) {
  harness::ExperimentSpec spec;
  spec.seeds = {0, 1, 2};
  const std::map<std::uint64_t, double> fixed{{0, 80.0}, {1, 82.0}, {2, 84.0}};
  harness::SeedTrainer stub = [&](const uda::StrategyConfig&, const data::Dataset& sim, std::uint64_t seed,
                                  const fs::path&) {
    harness::SeedOutcome o;
    o.ok = true;
    o.det_acc = fixed.at(seed) + 0.001 * sim.size();
    o.cls_acc = 60.0 + seed + 0.002 * sim.size();
    return o;
  };
  data::Dataset none;
  const auto rep = harness::run_experiment(spec, none, stub);
  const auto& det = rep.strategies.at(0).det;
  r.check(fmt::format("{:.2f}", det.mean) == "82.00" && std::abs(det.stddev - 1.633) <= kStddevTol,
          fmt::format("stub seeds {{80, 82, 84}}: mean {:.2f}, population stddev {:.4f}", det.mean, det.stddev));

  data::Dataset sim;
  sim.samples.resize(50);
  spec.output_dir = scratch("harness");
  const auto ab = harness::run_ablation(spec, sim, 10, stub);
  bool shaped = ab.ablation.size() == 2;
  for (const auto& curve : ab.ablation) {
    shaped &= curve.points.size() == 5;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const auto& p = curve.points[i];
      shaped &= p.result.det.stddev > 0 && p.sim_frames == 10 * (i + 1);
      if (i > 0) shaped &= p.result.det.mean > curve.points[i - 1].result.det.mean;
    }
  }
  for (const char* f : {"ablation.csv", "ablation_det.png", "ablation_cls.png", "ablation.json"}) {
    shaped &= fs::exists(spec.output_dir / f);
  }
  r.check(shaped, "ablation with stub trainer: direct + ada, 5 monotone points each, stddev bands, csv/png/json written");

  const auto counts = simulanes::divide_frames(100, 6);
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  int total = 0;
  for (int v : counts) total += v;
  r.check(total == 100 && *hi - *lo <= 1,
          fmt::format("100 frames over 6 maps: {} (spread {})", nlohmann::json(counts).dump(), *hi - *lo));
}

// ---------------------------------------------------------------------------
// determinism

std::string metrics_without_paths(const fs::path& file) {
  std::ifstream in(file);
  std::string out, line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    j.erase("checkpoint");
    out += j.dump() + "\n";
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void determinism(Report& r) {
  const auto root = scratch("determinism");
  // generate
  std::vector<std::string> labels, meta;
  for (int run = 0; run < 2; ++run) {
    const auto dir = root / fmt::format("gen_{}", run);
    toy::generate(dir, 12, 5, false, data::Domain::kSim);
    labels.push_back(slurp(dir / "labels_train.txt"));
    meta.push_back(slurp(dir / "scenes.jsonl"));
  }
  r.check(!labels[0].empty() && labels[0] == labels[1] && meta[0] == meta[1],
          "generate twice (same seed): label files and scene logs byte-identical");

  const auto d = toy::make_domains(root / "data", 8, 8, 4);
  for (auto s : {uda::Strategy::kDirect, uda::Strategy::kAda, uda::Strategy::kUnitAdv,
                 uda::Strategy::kTwoStageMunit}) {
    auto c = toy_config(s);
    c.augmentation = data::AugmentationParams{};
    c.max_epochs = 2;
    c.warmup_epochs = 1;
    c.translation_epochs = 2;
    c.batch_size = 4;
    std::vector<std::string> logs;
    std::vector<double> evals;
    for (int run = 0; run < 2; ++run) {
      const auto dir = root / fmt::format("{}_{}", uda::to_string(s), run);
      const auto res = uda::train_seed(c, {d.sim, d.real, d.real_val, d.sim_heldout}, 7, dir);
      logs.push_back(metrics_without_paths(dir / "metrics.jsonl"));
      auto model = uda::load_model(res.best.checkpoint);
      const auto e = detector::evaluate(model.forward(), d.real_val, model.config.anchors);
      evals.push_back(e.det_acc);
    }
    r.check(logs[0] == logs[1] && std::memcmp(&evals[0], &evals[1], sizeof(double)) == 0,
            fmt::format("train + eval {} twice (seed 7): metric logs and eval Det-Acc bitwise equal",
                        uda::to_string(s)));
  }
}

// ---------------------------------------------------------------------------

struct Criterion {
  std::string name;
  std::function<void(Report&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  g_scratch = fs::temp_directory_path() / "s2r_acceptance";
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::string(argv[i]) == "--only") only = argv[i + 1];
    if (std::string(argv[i]) == "--scratch") g_scratch = argv[i + 1];
  }
  spdlog::set_level(spdlog::level::warn);
  at::set_num_threads(1);

  const std::vector<Criterion> criteria = {
      {"loss-oracles", loss_oracles}, {"gradients", gradients},   {"metric", metric},
      {"geometry", geometry},         {"smoke-training", smoke},  {"equivalence", equivalence},
      {"harness", harness_checks},    {"determinism", determinism}};

  int unexpected = 0, red = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && c.name != only) continue;
    ++ran;
    Report rep;
    const auto t0 = Clock::now();
    try {
      c.run(rep);
    } catch (const std::exception& e) {
      rep.check(false, std::string("exception: ") + e.what());
    }
    const bool known = kKnownRed.count(c.name) > 0;
    std::cout << (rep.ok() ? "PASS " : "FAIL ") << c.name
              << fmt::format(" ({:.1f} s){}", secs_since(t0), !rep.ok() && known ? " [known red]" : "") << '\n';
    rep.print();
    std::cout.flush();
    if (!rep.ok()) {
      ++red;
      if (!known) ++unexpected;
    }
  }
  std::cout << fmt::format("{} of {} criteria pass; {} red ({} unexpected)\n", ran - red, ran, red, unexpected);
  return unexpected == 0 ? 0 : 1;
}
