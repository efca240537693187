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

#include "s2r/translation/export.hpp"

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "s2r/detector/targets.hpp"
#include "s2r/errors.hpp"
#include "s2r/lane/tusimple_io.hpp"

namespace s2r::translation {

namespace fs = std::filesystem;

fs::path export_translated(Translator& model, const data::Dataset& ds, Domain target,
                           const ExportOptions& opt) {
  if (ds.domain == target) throw UsageError("dataset is already in the target domain");
  if (opt.output_dir.empty()) throw ConfigError("export needs an output directory");
  const std::string split = data::to_string(opt.split);
  fs::create_directories(opt.output_dir / "images" / split);
  torch::NoGradGuard guard;
  const bool was_training = model->is_training();
  model->eval();

  std::vector<lane::LabelRecord> records;
  for (std::size_t start = 0; start < ds.size(); start += opt.batch_size) {
    const std::size_t end = std::min(ds.size(), start + opt.batch_size);
    std::vector<cv::Mat> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(ds.samples[i].image);
    const auto x = detector::images_to_tensor(batch, opt.model_size);
    for (std::size_t i = start; i < end; ++i) {
      // One call per frame so MUNIT styles depend only on the frame index.
      const auto y = model->translate(x.slice(0, i - start, i - start + 1), ds.domain, target,
                                      opt.style_seed + i);
      cv::Mat img = detector::tensor_to_image(y[0]);
      const cv::Mat& src = ds.samples[i].image;
      cv::resize(img, img, src.size(), 0, 0, cv::INTER_LINEAR);
      const std::string rel = fmt::format("images/{}/{:06d}.png", split, i);
      if (!cv::imwrite((opt.output_dir / rel).string(), img)) {
        throw ConfigError("failed to write " + rel);
      }
      records.push_back({rel, ds.samples[i].label});
    }
  }
  if (was_training) model->train();

  const std::string labels = "labels_" + split + ".txt";
  lane::write_label_file(opt.output_dir / labels, records);
  std::string mapping = "simulanes";
  if (ds.mapping) {
    ds.mapping->save(opt.output_dir / "classes.txt");
    mapping = "classes.txt";
  }
  data::DatasetManifest m;
  m.root = opt.output_dir;
  m.split = opt.split;
  m.frame_count = records.size();
  m.label_files = {labels};
  m.slot_layout = data::SlotLayout::kAsIs;
  m.class_mapping = mapping;
  const auto manifest = opt.output_dir / "manifest.json";
  data::write_manifest(manifest, m);
  return manifest;
}

}  // namespace s2r::translation
